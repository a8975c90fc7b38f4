"""Lozenge tilings, uniform spanning trees and their windings."""

__version__ = "0.1.0"
