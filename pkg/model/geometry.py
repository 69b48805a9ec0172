#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
物理参数与几何结构
定义自然单位下的物理常数、量子镜（布拉格原子阵列）和整体几何配置
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple
import math

import numpy as np

from .errors import InvalidGeometry, Unsupported


# 判断布拉格间距和位置重合时使用的相对容差
POSITION_TOL = 1e-12


@dataclass(frozen=True)
class PhysicalParams:
    """
    物理参数（自然单位：γ=1，λ₀=1）

    Attributes:
        gamma: 单个原子向波导的自发辐射率
        lambda0: 共振波长
        v: 导模传播速度（单位 λ₀γ）
    """

    gamma: float = 1.0
    lambda0: float = 1.0
    v: float = 100.0

    def __post_init__(self):
        for name in ('gamma', 'lambda0', 'v'):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise InvalidGeometry(f"physical.{name} must be a positive finite number, got {value!r}")

    @property
    def k0(self) -> float:
        """共振波数 k₀ = 2π/λ₀"""
        return 2.0 * math.pi / self.lambda0

    @property
    def omega0(self) -> float:
        """共振角频率 ω₀ = v·k₀"""
        return self.v * self.k0

    @property
    def g0(self) -> float:
        """单模耦合常数，满足 γ = 2π·g₀²"""
        return math.sqrt(self.gamma / (2.0 * math.pi))

    def phase(self, distance) -> np.ndarray:
        """传播相位 e^{ik₀d}"""
        return np.exp(1j * self.k0 * np.asarray(distance, dtype=float))


class MirrorDirection(str, Enum):
    """镜子原子从最近原子向外排列的方向"""

    PLUS_X = 'plus_x'
    MINUS_X = 'minus_x'

    @property
    def sign(self) -> int:
        return 1 if self is MirrorDirection.PLUS_X else -1


class ScenarioKind(str, Enum):
    SINGLE_MIRROR = 'single_mirror'
    CAVITY = 'cavity'
    FULL_ARRAY = 'full_array'


@dataclass(frozen=True)
class MirrorSpec:
    """
    单个量子镜

    Attributes:
        n_atoms: 原子数 N
        x_first: 离探测原子最近的镜子原子位置
        direction: 原子排列方向
        spacing: 原子间距，None 表示布拉格间距 λ₀/2
    """

    n_atoms: int
    x_first: float
    direction: MirrorDirection = MirrorDirection.PLUS_X
    spacing: Optional[float] = None

    def __post_init__(self):
        if isinstance(self.n_atoms, bool) or not isinstance(self.n_atoms, (int, np.integer)) or self.n_atoms < 1:
            raise InvalidGeometry(f"mirror n_atoms must be an integer >= 1, got {self.n_atoms!r}")
        if not math.isfinite(self.x_first):
            raise InvalidGeometry(f"mirror x_first must be finite, got {self.x_first!r}")
        if self.spacing is not None and not (math.isfinite(self.spacing) and self.spacing > 0):
            raise InvalidGeometry(f"mirror spacing must be positive, got {self.spacing!r}")
        object.__setattr__(self, 'direction', MirrorDirection(self.direction))

    def resolved_spacing(self, params: PhysicalParams) -> float:
        return params.lambda0 / 2.0 if self.spacing is None else float(self.spacing)

    def is_bragg(self, params: PhysicalParams) -> bool:
        return abs(self.resolved_spacing(params) - params.lambda0 / 2.0) <= POSITION_TOL * params.lambda0

    def positions(self, params: PhysicalParams) -> np.ndarray:
        """原子位置 x_n = x_first ± (n-1)·spacing，按离探测原子由近到远排列"""
        offsets = np.arange(self.n_atoms, dtype=float) * self.resolved_spacing(params)
        return self.x_first + self.direction.sign * offsets


@dataclass(frozen=True)
class Geometry:
    """
    整体几何配置

    Attributes:
        kind: 场景类型
        mirrors: 镜子列表；腔结构中顺序为 (QM1 在 -x₁, QM2 在 +x₁)
        x_a: 探测原子位置
    """

    kind: ScenarioKind
    mirrors: Tuple[MirrorSpec, ...] = field(default_factory=tuple)
    x_a: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'kind', ScenarioKind(self.kind))
        object.__setattr__(self, 'mirrors', tuple(self.mirrors))
        if not math.isfinite(self.x_a):
            raise InvalidGeometry(f"geometry.x_a must be finite, got {self.x_a!r}")
        if self.kind is ScenarioKind.CAVITY:
            if len(self.mirrors) != 2:
                raise InvalidGeometry(f"cavity geometry needs exactly two mirrors, got {len(self.mirrors)}")
            if abs(self.mirrors[0].x_first + self.mirrors[1].x_first) > POSITION_TOL * max(1.0, abs(self.mirrors[1].x_first)):
                raise Unsupported(
                    f"cavity mirrors must sit at -x1 and +x1, got {self.mirrors[0].x_first} and {self.mirrors[1].x_first}"
                )
            if self.mirrors[0].direction is not MirrorDirection.MINUS_X or self.mirrors[1].direction is not MirrorDirection.PLUS_X:
                raise InvalidGeometry("cavity mirrors must extend outward: QM1 along -x, QM2 along +x")
        elif len(self.mirrors) != 1:
            raise InvalidGeometry(f"{self.kind.value} geometry needs exactly one mirror, got {len(self.mirrors)}")

    @classmethod
    def single_mirror(cls, n_atoms: int, x1: float, spacing: Optional[float] = None) -> 'Geometry':
        """探测原子在原点，镜子从 x₁ 向 +x 方向排列"""
        return cls(ScenarioKind.SINGLE_MIRROR, (MirrorSpec(n_atoms, x1, MirrorDirection.PLUS_X, spacing),), 0.0)

    @classmethod
    def full_array(cls, n_atoms: int, x1: float, spacing: Optional[float] = None, x_a: float = 0.0) -> 'Geometry':
        return cls(ScenarioKind.FULL_ARRAY, (MirrorSpec(n_atoms, x1, MirrorDirection.PLUS_X, spacing),), x_a)

    @classmethod
    def cavity(cls, n_atoms: int, x1: float, x_a: float = 0.0, spacing: Optional[float] = None) -> 'Geometry':
        """对称腔：QM1 从 -x₁ 向 -x 排列，QM2 从 +x₁ 向 +x 排列"""
        return cls(
            ScenarioKind.CAVITY,
            (
                MirrorSpec(n_atoms, -x1, MirrorDirection.MINUS_X, spacing),
                MirrorSpec(n_atoms, x1, MirrorDirection.PLUS_X, spacing),
            ),
            x_a,
        )

    @property
    def x1(self) -> float:
        """探测原子到最近镜子原子的距离（腔结构中为 QM2 的位置）"""
        return float(abs(self.mirrors[-1].x_first))

    def all_positions(self, params: PhysicalParams) -> np.ndarray:
        """所有原子位置（先镜子原子，后探测原子）"""
        parts = [mirror.positions(params) for mirror in self.mirrors]
        parts.append(np.array([self.x_a], dtype=float))
        return np.concatenate(parts)

    def validate(self, params: PhysicalParams) -> None:
        """检查原子位置互不重合"""
        check_distinct(self.all_positions(params), params)


def check_distinct(positions, params: PhysicalParams) -> None:
    """
    检查位置两两不同

    Raises:
        InvalidGeometry: 存在重合位置
    """
    xs = np.sort(np.asarray(positions, dtype=float))
    if xs.size < 2:
        return
    gaps = np.diff(xs)
    idx = int(np.argmin(gaps))
    if gaps[idx] <= POSITION_TOL * params.lambda0:
        raise InvalidGeometry(f"two atoms share position x={xs[idx]:.12g}")
