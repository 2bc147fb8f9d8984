#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Logging Setup

Routes loguru output to stderr so stdout stays reserved for data and tables.
"""

import sys
from typing import Optional

from loguru import logger

LOG_FORMAT = (
    "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan> - <level>{message}</level>"
)


def setup_logging(
    level: str = "INFO",
    log_path: Optional[str] = None,
    rotation: str = "10 MB",
    retention: int = 5
) -> None:
    """
    配置日志输出

    Args:
        level: 日志级别
        log_path: 日志文件路径,为None时只输出到stderr
        rotation: 文件轮转大小
        retention: 保留的历史文件数
    """
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format=LOG_FORMAT)

    if log_path:
        logger.add(
            log_path,
            level=level.upper(),
            rotation=rotation,
            retention=retention,
            encoding="utf-8",
            enqueue=True
        )
