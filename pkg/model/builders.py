#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
耦合矩阵构造
根据几何配置组装每个分支的非厄米耦合矩阵 A（dc/dt = A c，马尔可夫近似）
"""

from typing import Optional, Sequence, Tuple
import math

import numpy as np
from loguru import logger

from .branches import Branch, BranchLabel, BranchSystem, Slot, SlotKind
from .errors import CollectiveInvalid, InvalidGeometry, Unsupported
from .geometry import Geometry, PhysicalParams, ScenarioKind, check_distinct


def default_weights(n_branches: int) -> Tuple[complex, ...]:
    """等权叠加：单镜 1/√2，腔 1/2"""
    return (1.0 / math.sqrt(n_branches),) * n_branches


def _resolve_weights(weights: Optional[Sequence[complex]], n_branches: int) -> Tuple[complex, ...]:
    if weights is None:
        return default_weights(n_branches)
    weights = tuple(complex(w) for w in weights)
    if len(weights) != n_branches:
        raise InvalidGeometry(f"expected {n_branches} branch weights, got {len(weights)}")
    return weights


def _probe_slot(x_a: float) -> Slot:
    return Slot('A', SlotKind.PROBE, float(x_a))


def _initial(slots: Sequence[Slot], init_mirror: complex) -> np.ndarray:
    """探测原子激发，集体镜子态取 init_mirror，之后整体归一化"""
    init = np.array([1.0 if s.kind is SlotKind.PROBE else init_mirror for s in slots], dtype=complex)
    return init / np.linalg.norm(init)


def _require_bragg(params: PhysicalParams, geom: Geometry) -> None:
    for i, mirror in enumerate(geom.mirrors):
        if not mirror.is_bragg(params):
            raise CollectiveInvalid(
                f"mirror {i + 1}: spacing {mirror.resolved_spacing(params)} is not lambda0/2, "
                f"collective reduction does not apply"
            )


def build_single_mirror_collective(params: PhysicalParams, geom: Geometry,
                                   weights: Optional[Sequence[complex]] = None,
                                   init_mirror: complex = 0.0) -> BranchSystem:
    """
    单镜集体模型

    G 分支槽位 (QM, A)：
        A_G = -(γ/2)·[[N, √N e^{ik₀x₁}], [√N e^{ik₀x₁}, 1]]
    Gp 分支只有探测原子：[-γ/2]

    Args:
        params: 物理参数
        geom: 单镜几何，探测原子在原点
        weights: 分支权重 (w_G, w_Gp)，默认 1/√2
        init_mirror: 集体镜子态初始振幅（归一化前）

    Returns:
        BranchSystem
    """
    if geom.kind is not ScenarioKind.SINGLE_MIRROR:
        raise InvalidGeometry(f"single-mirror builder needs a single_mirror geometry, got {geom.kind.value}")
    _require_bragg(params, geom)
    if geom.x_a != 0.0:
        raise InvalidGeometry(f"single-mirror probe must sit at x_a=0, got {geom.x_a}")
    mirror = geom.mirrors[0]
    if mirror.direction.sign * mirror.x_first <= 0:
        raise InvalidGeometry(f"mirror at x1={mirror.x_first} must extend away from the probe")
    geom.validate(params)

    # 计算探测原子与集体镜子态的耦合
    n = mirror.n_atoms
    half = -0.5 * params.gamma
    phase = params.phase(abs(mirror.x_first - geom.x_a))
    coupling = half * math.sqrt(n) * phase
    # 组装 G 分支矩阵，槽位顺序 (QM, A)
    matrix_g = np.array([[half * n, coupling], [coupling, half]], dtype=complex)

    qm = Slot('QM', SlotKind.COLLECTIVE, float(mirror.x_first), n, mirror=0, anchor=float(mirror.x_first))
    probe = _probe_slot(geom.x_a)
    labels = BranchLabel.all_for(1)
    branches = (
        Branch(labels[0], (qm, probe), matrix_g, _initial((qm, probe), init_mirror)),
        Branch(labels[1], (probe,), np.array([[half]], dtype=complex), np.array([1.0 + 0j])),
    )
    logger.debug(f"single mirror N={n} x1={mirror.x_first}: coupling {coupling:.6g}")
    return BranchSystem(params, branches, _resolve_weights(weights, 2), geom,
                        f"single mirror N={n} x1={mirror.x_first:g}")


def build_cavity_collective(params: PhysicalParams, geom: Geometry,
                            weights: Optional[Sequence[complex]] = None,
                            init_mirror: complex = 0.0) -> BranchSystem:
    """
    双镜腔集体模型

    GG 分支槽位 (A, QM1, QM2)；GGp 只有 QM1 反射，GpG 只有 QM2 反射，GpGp 为开放波导。
    探测原子-QM1 耦合相位 e^{ik₀(x₁+x_A)}，探测原子-QM2 为 e^{ik₀(x₁-x_A)}，
    两镜之间为 N e^{2ik₀x₁}。
    """
    if geom.kind is not ScenarioKind.CAVITY:
        raise InvalidGeometry(f"cavity builder needs a cavity geometry, got {geom.kind.value}")
    qm1_spec, qm2_spec = geom.mirrors
    if qm1_spec.n_atoms != qm2_spec.n_atoms:
        raise Unsupported(f"cavity mirrors must have equal size, got {qm1_spec.n_atoms} and {qm2_spec.n_atoms}")
    _require_bragg(params, geom)
    x1 = geom.x1
    if abs(geom.x_a) >= x1:
        raise InvalidGeometry(f"probe x_a={geom.x_a} must lie inside the cavity |x_a| < x1={x1}")
    geom.validate(params)

    # 计算耦合系数
    n = qm2_spec.n_atoms
    sqrt_n = math.sqrt(n)
    half = -0.5 * params.gamma
    p1 = half * sqrt_n * params.phase(x1 + geom.x_a)
    p2 = half * sqrt_n * params.phase(x1 - geom.x_a)
    self_term = half * n
    cross = half * n * params.phase(2.0 * x1)

    probe = _probe_slot(geom.x_a)
    qm1 = Slot('QM1', SlotKind.COLLECTIVE, float(qm1_spec.x_first), n, mirror=0, anchor=float(qm1_spec.x_first))
    qm2 = Slot('QM2', SlotKind.COLLECTIVE, float(qm2_spec.x_first), n, mirror=1, anchor=float(qm2_spec.x_first))

    # 组装四个分支的矩阵，反射镜缺席时删去对应行列
    gg = np.array([
        [half, p1, p2],
        [p1, self_term, cross],
        [p2, cross, self_term],
    ], dtype=complex)
    ggp = np.array([[half, p1], [p1, self_term]], dtype=complex)
    gpg = np.array([[half, p2], [p2, self_term]], dtype=complex)
    gpgp = np.array([[half]], dtype=complex)

    label_gg, label_ggp, label_gpg, label_gpgp = BranchLabel.all_for(2)
    branches = (
        Branch(label_gg, (probe, qm1, qm2), gg, _initial((probe, qm1, qm2), init_mirror)),
        Branch(label_ggp, (probe, qm1), ggp, _initial((probe, qm1), init_mirror)),
        Branch(label_gpg, (probe, qm2), gpg, _initial((probe, qm2), init_mirror)),
        Branch(label_gpgp, (probe,), gpgp, np.array([1.0 + 0j])),
    )
    logger.debug(f"cavity N={n} x1={x1} x_a={geom.x_a}: inter-mirror coupling {cross:.6g}")
    return BranchSystem(params, branches, _resolve_weights(weights, 4), geom,
                        f"cavity N={n} x1={x1:g} x_a={geom.x_a:g}")


def build_full_array(params: PhysicalParams, positions: Sequence[float], probe_x: float,
                     weights: Optional[Sequence[complex]] = None,
                     mirror_ids: Optional[Sequence[int]] = None,
                     geometry: Optional[Geometry] = None) -> BranchSystem:
    """
    逐原子模型（任意间距）

    A_jl = -(γ/2)·e^{ik₀|x_j - x_l|}，对角元 -γ/2。每个镜子（mirror_ids 相同的原子）
    有 G / Gp 两种状态，分支中只包含处于 G 态的镜子原子和探测原子。

    Args:
        params: 物理参数
        positions: 镜子原子位置
        probe_x: 探测原子位置
        weights: 分支权重，默认等权
        mirror_ids: 每个原子所属镜子序号，默认全部属于同一个镜子
        geometry: 生成位置所用的几何（可选，仅作记录）

    Returns:
        BranchSystem，槽位依次为 M1..MN 和 A
    """
    xs = np.asarray(positions, dtype=float)
    if xs.ndim != 1 or xs.size < 1:
        raise InvalidGeometry("full array needs at least one mirror atom position")
    check_distinct(np.append(xs, probe_x), params)
    ids = np.zeros(xs.size, dtype=int) if mirror_ids is None else np.asarray(mirror_ids, dtype=int)
    if ids.shape != xs.shape:
        raise InvalidGeometry(f"mirror_ids has {ids.size} entries for {xs.size} atoms")
    mirrors = sorted(set(ids.tolist()))

    # 每个镜子离探测原子最近的原子作为推迟时间参考
    anchors = {}
    for m in mirrors:
        members = xs[ids == m]
        anchors[m] = float(members[np.argmin(np.abs(members - probe_x))])
    atom_slots = [
        Slot(f"M{i + 1}", SlotKind.ATOM, float(x), 1, mirror=mirrors.index(int(m)), anchor=anchors[int(m)])
        for i, (x, m) in enumerate(zip(xs, ids))
    ]
    probe = _probe_slot(probe_x)

    branches = []
    for label in BranchLabel.all_for(len(mirrors)):
        active = [s for s in atom_slots if label.reflective(s.mirror)]
        slots = tuple(active) + (probe,)
        # 两两距离的相位矩阵，对角元 -γ/2
        where = np.array([s.position for s in slots])
        distance = np.abs(where[:, None] - where[None, :])
        matrix = -0.5 * params.gamma * params.phase(distance)
        init = np.zeros(len(slots), dtype=complex)
        init[-1] = 1.0
        branches.append(Branch(label, slots, matrix, init))

    logger.debug(f"full array with {xs.size} atoms in {len(mirrors)} mirror(s)")
    return BranchSystem(params, tuple(branches), _resolve_weights(weights, len(branches)), geometry,
                        f"full array N={xs.size}")


def build_system(params: PhysicalParams, geom: Geometry, collective: bool = True,
                 weights: Optional[Sequence[complex]] = None,
                 init_mirror: complex = 0.0) -> BranchSystem:
    """按几何类型选择构造函数"""
    if collective and geom.kind is ScenarioKind.SINGLE_MIRROR:
        return build_single_mirror_collective(params, geom, weights, init_mirror)
    if collective and geom.kind is ScenarioKind.CAVITY:
        return build_cavity_collective(params, geom, weights, init_mirror)
    if init_mirror != 0:
        raise Unsupported("init_mirror override needs a collective model")
    positions = [mirror.positions(params) for mirror in geom.mirrors]
    ids = np.concatenate([np.full(len(p), i) for i, p in enumerate(positions)])
    return build_full_array(params, np.concatenate(positions), geom.x_a, weights, ids, geom)


def bragg_bright_mode(n_atoms: int) -> np.ndarray:
    """交替符号的集体明态 (-1)^{n-1}/√N，原子按离探测原子由近到远排列"""
    signs = np.where(np.arange(n_atoms) % 2 == 0, 1.0, -1.0)
    return signs / math.sqrt(n_atoms)


def collective_projector(branch: Branch, groups: Sequence[Sequence[str]]) -> np.ndarray:
    """
    逐原子分支到集体基 [探测原子, 明态1, 明态2, ...] 的投影矩阵 P

    Args:
        branch: build_full_array 生成的分支
        groups: 每个镜子的原子槽位名，按离探测原子由近到远排列

    Returns:
        (dim, 1+len(groups)) 实矩阵
    """
    projector = np.zeros((branch.dim, 1 + len(groups)))
    projector[branch.probe_index, 0] = 1.0
    for j, names in enumerate(groups, start=1):
        bright = bragg_bright_mode(len(names))
        for name, value in zip(names, bright):
            projector[branch.slot_index(name), j] = value
    return projector


def collective_projection(branch: Branch, groups: Sequence[Sequence[str]]) -> np.ndarray:
    """Pᵀ A P，在布拉格间距下与集体构造函数的矩阵一致"""
    projector = collective_projector(branch, groups)
    return projector.T @ branch.matrix @ projector
