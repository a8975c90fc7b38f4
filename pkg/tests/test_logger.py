import logging

from lozenge_lab.utils.logger import (
    Logger,
    get_logger,
    log_exception,
)


def test_log_output(tmp_path):
    log_file = tmp_path / "test.log"
    logger = Logger("lozenge_lab.test_output", log_file=str(log_file))
    logger.log("sample message")

    assert log_file.exists()
    contents = log_file.read_text()
    assert "sample message" in contents
    assert " - INFO - " in contents


def test_log_level_names(tmp_path):
    log_file = tmp_path / "levels.log"
    logger = Logger("lozenge_lab.test_levels", log_file=str(log_file))
    logger.log("hidden", "debug")
    logger.log("shown", "warning")
    logger.log("fallback", "no-such-level")

    contents = log_file.read_text()
    assert "hidden" not in contents
    assert "WARNING - shown" in contents
    assert "INFO - fallback" in contents


def test_get_logger_is_package_child():
    logger = get_logger("test")
    assert isinstance(logger, logging.Logger)
    assert logger.name == "lozenge_lab.test"
    assert get_logger("lozenge_lab.trees").name == "lozenge_lab.trees"
    assert get_logger().name == "lozenge_lab"


def test_log_exception_does_not_raise():
    logger = get_logger("test_exception")
    try:
        raise ValueError("boom")
    except ValueError as exc:
        log_exception(logger, "testing", exc)
    assert True
