#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
分支数据模型
单激发子空间中按镜子基态配置（G / G'）划分的分支，每个分支满足 dc/dt = A c
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import product
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union
import math

import numpy as np
import pandas as pd
from loguru import logger

from .errors import InvalidGeometry, NumericalFailure
from .geometry import Geometry, PhysicalParams


NORMALIZATION_TOL = 1e-10
PASSIVITY_TOL = 1e-10
NORM_MONOTONE_TOL = 1e-9


class MirrorState(str, Enum):
    """镜子集体基态：G 反射，Gp 透明"""

    G = 'G'
    GP = 'Gp'


@dataclass(frozen=True, order=True)
class BranchLabel:
    """分支标签，每个镜子一个基态标记"""

    tags: Tuple[MirrorState, ...]

    def __post_init__(self):
        object.__setattr__(self, 'tags', tuple(MirrorState(tag) for tag in self.tags))

    def __str__(self) -> str:
        return ''.join(tag.value for tag in self.tags)

    @classmethod
    def parse(cls, text: str) -> 'BranchLabel':
        """从 'GGp' 这类字符串解析"""
        tags = []
        rest = text
        while rest:
            if rest.startswith('Gp'):
                tags.append(MirrorState.GP)
                rest = rest[2:]
            elif rest.startswith('G'):
                tags.append(MirrorState.G)
                rest = rest[1:]
            else:
                raise ValueError(f"invalid branch label {text!r}")
        if not tags:
            raise ValueError("empty branch label")
        return cls(tuple(tags))

    @classmethod
    def all_for(cls, n_mirrors: int) -> Tuple['BranchLabel', ...]:
        """全部 2^n 个标签，顺序 G 在前（单镜：G, Gp；腔：GG, GGp, GpG, GpGp）"""
        return tuple(cls(combo) for combo in product((MirrorState.G, MirrorState.GP), repeat=n_mirrors))

    def reflective(self, mirror_index: int) -> bool:
        return self.tags[mirror_index] is MirrorState.G


LabelLike = Union[BranchLabel, str]


def as_label(label: LabelLike) -> BranchLabel:
    return label if isinstance(label, BranchLabel) else BranchLabel.parse(label)


class SlotKind(str, Enum):
    PROBE = 'probe'
    COLLECTIVE = 'collective'
    ATOM = 'atom'


@dataclass(frozen=True)
class Slot:
    """
    振幅槽位

    Attributes:
        name: 槽位名（A, QM, QM1, M3 ...）
        kind: 探测原子 / 集体镜子态 / 单个镜子原子
        position: 相位参考位置（集体态取镜子最近原子位置）
        n_atoms: 集体态包含的原子数，场振幅按 √N 放大
        mirror: 所属镜子序号，探测原子为 None
        anchor: 无延迟近似下推迟时间的参考位置（所属镜子最近原子）
    """

    name: str
    kind: SlotKind
    position: float
    n_atoms: int = 1
    mirror: Optional[int] = None
    anchor: Optional[float] = None

    @property
    def field_scale(self) -> float:
        return math.sqrt(self.n_atoms) if self.kind is SlotKind.COLLECTIVE else 1.0

    @property
    def retardation_anchor(self) -> float:
        return self.position if self.anchor is None else self.anchor


def _frozen_array(values, dtype=complex) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Branch:
    """单个分支：槽位、耦合矩阵 A（单位 γ）和初始振幅"""

    label: BranchLabel
    slots: Tuple[Slot, ...]
    matrix: np.ndarray
    init: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'slots', tuple(self.slots))
        object.__setattr__(self, 'matrix', _frozen_array(self.matrix))
        object.__setattr__(self, 'init', _frozen_array(self.init))
        dim = len(self.slots)
        if self.matrix.shape != (dim, dim) or self.init.shape != (dim,):
            raise InvalidGeometry(
                f"branch {self.label}: matrix {self.matrix.shape} / init {self.init.shape} do not match {dim} slots"
            )

    @property
    def dim(self) -> int:
        return len(self.slots)

    @property
    def slot_names(self) -> Tuple[str, ...]:
        return tuple(slot.name for slot in self.slots)

    def slot_index(self, name: str) -> int:
        try:
            return self.slot_names.index(name)
        except ValueError:
            raise KeyError(f"branch {self.label} has no slot {name!r}; slots are {self.slot_names}") from None

    @property
    def probe_index(self) -> int:
        for i, slot in enumerate(self.slots):
            if slot.kind is SlotKind.PROBE:
                return i
        raise KeyError(f"branch {self.label} has no probe slot")

    def decay_matrix(self) -> np.ndarray:
        """Γ = -(A + A†)"""
        return -(self.matrix + self.matrix.conj().T)

    def check(self) -> None:
        """检查复对称性和耗散性（Γ 半正定）"""
        if not np.array_equal(self.matrix, self.matrix.T):
            raise InvalidGeometry(f"branch {self.label}: coupling matrix is not complex symmetric")
        eigs = np.linalg.eigvalsh(self.decay_matrix())
        if eigs.size and eigs.min() < -PASSIVITY_TOL:
            raise InvalidGeometry(f"branch {self.label}: decay matrix not positive semidefinite (min eig {eigs.min():.3e})")


@dataclass(frozen=True)
class BranchSystem:
    """
    多分支系统

    Attributes:
        params: 物理参数
        branches: 按标签排列的分支
        weights: 每个分支的复权重
        geometry: 构造时使用的几何（全阵列直接给位置时为 None）
        description: 场景描述
    """

    params: PhysicalParams
    branches: Tuple[Branch, ...]
    weights: Tuple[complex, ...]
    geometry: Optional[Geometry] = None
    description: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'branches', tuple(self.branches))
        object.__setattr__(self, 'weights', tuple(complex(w) for w in self.weights))
        if len(self.weights) != len(self.branches):
            raise InvalidGeometry(f"expected {len(self.branches)} branch weights, got {len(self.weights)}")
        labels = [b.label for b in self.branches]
        if len(set(labels)) != len(labels):
            raise InvalidGeometry(f"duplicate branch labels {labels}")
        for branch in self.branches:
            branch.check()
        total = sum(abs(w) ** 2 * float(np.sum(np.abs(b.init) ** 2)) for w, b in zip(self.weights, self.branches))
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise InvalidGeometry(f"initial state is not normalized (total probability {total:.12g})")

    @property
    def labels(self) -> Tuple[BranchLabel, ...]:
        return tuple(b.label for b in self.branches)

    def branch(self, label: LabelLike) -> Branch:
        label = as_label(label)
        for b in self.branches:
            if b.label == label:
                return b
        raise KeyError(f"no branch {label}; available: {[str(l) for l in self.labels]}")

    def weight(self, label: LabelLike) -> complex:
        label = as_label(label)
        return self.weights[self.labels.index(label)]

    def with_weights(self, weights: Sequence[complex]) -> 'BranchSystem':
        return replace(self, weights=tuple(complex(w) for w in weights))

    def with_initial(self, label: LabelLike, amplitudes: Mapping[str, complex]) -> 'BranchSystem':
        """
        覆盖某个分支的初始振幅，并把该分支归一化

        Args:
            label: 分支标签
            amplitudes: 槽位名 -> 初始振幅，未给出的槽位保持原值
        """
        target = self.branch(label)
        init = np.array(target.init, dtype=complex)
        for name, value in amplitudes.items():
            init[target.slot_index(name)] = complex(value)
        norm = float(np.linalg.norm(init))
        if norm == 0.0:
            raise InvalidGeometry(f"branch {target.label}: initial amplitudes are all zero")
        new_branch = replace(target, init=init / norm)
        branches = tuple(new_branch if b.label == target.label else b for b in self.branches)
        return replace(self, branches=branches)


@dataclass(frozen=True)
class Trajectory:
    """
    振幅随时间的演化

    Attributes:
        t_grid: 严格递增的时间网格（单位 1/γ）
        system: 产生该轨迹的分支系统（槽位、权重）
        amplitudes: 标签 -> (n_t, n_slots) 复数组
        params: 物理参数
        metadata: 场景描述等附加信息
    """

    t_grid: np.ndarray
    system: BranchSystem
    amplitudes: Dict[BranchLabel, np.ndarray]
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 't_grid', _frozen_array(self.t_grid, dtype=float))
        frozen = {as_label(k): _frozen_array(v) for k, v in self.amplitudes.items()}
        object.__setattr__(self, 'amplitudes', frozen)

    @property
    def params(self) -> PhysicalParams:
        return self.system.params

    @property
    def labels(self) -> Tuple[BranchLabel, ...]:
        return tuple(self.amplitudes.keys())

    @property
    def t_max(self) -> float:
        return float(self.t_grid[-1])

    def slots(self, label: LabelLike) -> Tuple[Slot, ...]:
        return self.system.branch(label).slots

    def amplitude(self, label: LabelLike, slot: str) -> np.ndarray:
        label = as_label(label)
        index = self.system.branch(label).slot_index(slot)
        return self.amplitudes[label][:, index]

    def probability(self, label: LabelLike, slot: str) -> np.ndarray:
        return np.abs(self.amplitude(label, slot)) ** 2

    def population(self, label: LabelLike) -> np.ndarray:
        """分支内原子激发总概率 Σ|c|²"""
        return np.sum(np.abs(self.amplitudes[as_label(label)]) ** 2, axis=1)

    def emitted_probability(self, label: LabelLike) -> np.ndarray:
        """已辐射到波导中的概率（以该分支初始范数为基准）"""
        pop = self.population(label)
        return pop[0] - pop

    def mirror_population(self, label: LabelLike) -> np.ndarray:
        label = as_label(label)
        branch = self.system.branch(label)
        idx = [i for i, s in enumerate(branch.slots) if s.kind is not SlotKind.PROBE]
        if not idx:
            return np.zeros_like(self.t_grid)
        return np.sum(np.abs(self.amplitudes[label][:, idx]) ** 2, axis=1)

    def check_norm_monotone(self, tol: float = NORM_MONOTONE_TOL) -> None:
        """
        检查每个分支的范数不增

        Raises:
            NumericalFailure: 某一步范数增长超过容差
        """
        for label in self.labels:
            pop = self.population(label)
            growth = np.diff(pop)
            if growth.size and growth.max() > tol:
                i = int(np.argmax(growth))
                raise NumericalFailure("branch norm increased", branch=str(label), t=float(self.t_grid[i + 1]))

    def to_frame(self) -> pd.DataFrame:
        """长表格式：t, branch, slot, re, im, prob"""
        frames = []
        for label in self.labels:
            amps = self.amplitudes[label]
            for j, slot in enumerate(self.slots(label)):
                c = amps[:, j]
                frames.append(pd.DataFrame({
                    't': self.t_grid,
                    'branch': str(label),
                    'slot': slot.name,
                    're': c.real,
                    'im': c.imag,
                    'prob': np.abs(c) ** 2,
                }))
        return pd.concat(frames, ignore_index=True)

    def summary(self) -> pd.DataFrame:
        """每个分支终态的探测原子概率、镜子概率和辐射概率"""
        rows = []
        for label in self.labels:
            branch = self.system.branch(label)
            rows.append({
                'branch': str(label),
                'weight_prob': abs(self.system.weight(label)) ** 2,
                'probe_prob_final': float(self.probability(label, branch.slots[branch.probe_index].name)[-1]),
                'mirror_prob_final': float(self.mirror_population(label)[-1]),
                'emitted_prob_final': float(self.emitted_probability(label)[-1]),
            })
        logger.debug(f"trajectory summary over {len(rows)} branches")
        return pd.DataFrame(rows)

