"""Exception hierarchy.  Every class carries the CLI exit code it maps to."""


class EllSheafError(Exception):
    code = 10


class LevelError(EllSheafError):
    code = 11


class TowerBudgetExceeded(EllSheafError):
    code = 12


class NotAUnit(EllSheafError):
    code = 13


class EmptyWindow(EllSheafError):
    code = 14


class PrecisionExhausted(EllSheafError):
    code = 15


class DivisionByZero(EllSheafError, ZeroDivisionError):
    code = 16


class DimensionMismatch(EllSheafError):
    code = 17


class NotEllipticCharacteristic(EllSheafError):
    code = 18


class CharacteristicCollision(EllSheafError):
    code = 19


class ZeroTheta(CharacteristicCollision):
    code = 19


class DepthTooShallow(EllSheafError):
    code = 20


class WindowTooSmall(EllSheafError):
    code = 21


class RankNotOne(EllSheafError):
    code = 22


class GuardBandTooNarrow(EllSheafError):
    code = 23


class DegenerateDeterminant(EllSheafError):
    code = 24


class StoreCorrupt(EllSheafError):
    code = 25


EXIT_CODES = {
    cls.__name__: cls.code
    for cls in [
        LevelError, TowerBudgetExceeded, NotAUnit, EmptyWindow, PrecisionExhausted,
        DivisionByZero, DimensionMismatch, NotEllipticCharacteristic,
        CharacteristicCollision, DepthTooShallow, WindowTooSmall, RankNotOne,
        GuardBandTooNarrow, DegenerateDeterminant, StoreCorrupt,
    ]
}
