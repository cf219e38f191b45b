"""
Исключения библиотеки stochastic_bne.

Нарушения инвариантов игры — это данные (см. game_core.validate),
а не исключения. Исключения поднимаются только там, где операция
не может вернуть осмысленный результат.
"""

from typing import Any, Dict, Optional


class BneError(Exception):
    """Базовое исключение пакета. details уходит в JSON-ответ CLI."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = dict(details or {})


class SingularMatrix(BneError):
    """Гауссово исключение не нашло ненулевой ведущий элемент."""


class DimensionMismatch(BneError):
    """Размеры матриц, стратегий или таблиц не согласованы."""


class EnumerationCapExceeded(BneError):
    """Перебор политик/профилей больше настроенного лимита."""


class NotSingleController(BneError):
    """Переходы зависят от действий игрока, который не должен управлять."""


class NoInteriorSolution(BneError):
    """Уравнения безразличия не дают решения внутри [0, 1]."""


class NotSCAR(BneError):
    """Игра не SC-AR; witness описывает структурную причину."""

    def __init__(self, message: str, witness: Any = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        self.witness = witness


class InvalidCertificate(BneError):
    """Условия сертификации противоречат друг другу (например, C1 при β̂)."""


class ZeroRates(BneError):
    """‖μ‖ = 0: равномеризация не определена."""


class NotBlackwellOptimal(BneError):
    """Политика проигрывает одношаговому отклонению при β → 1."""


class GameFileError(BneError):
    """Ошибка входных данных: JSON игры, строка стратегии, аргументы."""
