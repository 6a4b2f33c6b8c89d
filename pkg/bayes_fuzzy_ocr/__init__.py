from bayes_fuzzy_ocr.logconf import logger

__all__ = ["logger"]
