import logging

LOGGER = logging.getLogger("eivslope")
LOGGER.setLevel(logging.INFO)
