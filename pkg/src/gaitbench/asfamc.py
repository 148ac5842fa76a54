"""ASF skeleton and AMC motion file I/O for CMU-style motion capture data.

ASF documents are expected to contain the sections ``:units``, ``:root``,
``:bonedata`` and ``:hierarchy``.  AMC documents consist of comment and
directive lines followed by frame blocks (a frame-number line, then one
``bonename v1 v2 ...`` line per animated bone).  All angles are kept in
degrees; forward kinematics converts to radians internally.

Every type in this module is immutable after construction and every
operation is a pure function, so parsing many files in parallel is safe.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import HeterogeneousTopology, MalformedAmc, MalformedAsf

ROTATION_DOF = ("rx", "ry", "rz")
TRANSLATION_DOF = ("tx", "ty", "tz")
_VALID_DOF = set(ROTATION_DOF) | set(TRANSLATION_DOF)


@dataclass(frozen=True)
class Joint:
    """One node of the skeleton tree.

    The root is a zero-length joint; every other joint corresponds to a
    bone whose distal end carries the joint position.
    """

    name: str
    parent: int                 # index into Skeleton.joints, -1 for the root
    direction: np.ndarray       # unit vector in the global rest frame
    length: float
    axis: np.ndarray            # local-frame Euler angles, degrees
    axis_order: str             # e.g. "XYZ"; order[0] is applied first
    dof: tuple[str, ...]        # animated channels, subset of tx..rz


@dataclass(frozen=True)
class Skeleton:
    """Bone hierarchy parsed from an ASF document.

    Joints are stored in hierarchy-traversal order, so every joint's
    parent index is smaller than its own index and joints[0] is the root.
    """

    joints: tuple[Joint, ...]
    name: str = "skeleton"
    angle_unit: str = "deg"
    length_scale: float = 1.0
    root_position: np.ndarray = None

    def __post_init__(self):
        if self.root_position is None:
            object.__setattr__(self, "root_position", np.zeros(3))

    @property
    def num_joints(self) -> int:
        return len(self.joints)

    @property
    def joint_names(self) -> tuple[str, ...]:
        return tuple(j.name for j in self.joints)

    @property
    def parents(self) -> tuple[int, ...]:
        return tuple(j.parent for j in self.joints)

    def index(self, name: str) -> int:
        for i, j in enumerate(self.joints):
            if j.name == name:
                return i
        raise KeyError(name)

    @property
    def rotation_channels(self) -> tuple[tuple[str, str], ...]:
        """(joint name, dof) pairs for every rotational channel, in order."""
        out = []
        for j in self.joints:
            out.extend((j.name, d) for d in j.dof if d in ROTATION_DOF)
        return tuple(out)

    def topology_signature(self):
        return tuple((j.name, j.parent, j.dof, j.axis_order) for j in self.joints)


@dataclass(frozen=True)
class MotionSequence:
    """Per-frame channel values for one recording, bound to a skeleton.

    ``values`` maps each animated joint name to a (T, len(dof)) array in
    AMC units (degrees for rotations, skeleton length units for the root
    translation).
    """

    skeleton: Skeleton
    values: dict
    frame_rate: float = 120.0
    subject_id: str = ""
    source_file: str = ""

    @property
    def num_frames(self) -> int:
        for arr in self.values.values():
            return arr.shape[0]
        return 0

    def rotation_matrix(self) -> np.ndarray:
        """All rotational channels as a (T, R) array in skeleton order."""
        cols = []
        for joint in self.skeleton.joints:
            if joint.name not in self.values:
                continue
            arr = self.values[joint.name]
            for k, d in enumerate(joint.dof):
                if d in ROTATION_DOF:
                    cols.append(arr[:, k])
        if not cols:
            return np.zeros((self.num_frames, 0))
        return np.stack(cols, axis=1)

    def window(self, start: int, stop: int) -> "MotionSequence":
        """Contiguous sub-motion covering frames [start, stop)."""
        sliced = {n: a[start:stop].copy() for n, a in self.values.items()}
        return replace(self, values=sliced)

    def allclose(self, other: "MotionSequence", atol: float = 5e-7) -> bool:
        if self.skeleton.joint_names != other.skeleton.joint_names:
            return False
        if set(self.values) != set(other.values):
            return False
        for name, arr in self.values.items():
            o = other.values[name]
            if arr.shape != o.shape or not np.allclose(arr, o, atol=atol):
                return False
        return True


def _tokens(text: str):
    """Yield (lineno, tokens) for every non-empty, non-comment line."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _floats(parts, n, lineno, what):
    if len(parts) < n:
        raise MalformedAsf(f"line {lineno}: {what} expects {n} numbers")
    try:
        return [float(p) for p in parts[:n]]
    except ValueError as exc:
        raise MalformedAsf(f"line {lineno}: non-numeric {what}: {exc}") from None


def _unit(vec: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(vec)
    if norm < 1e-10:
        return np.zeros(3)
    return vec / norm


def parse_asf(text: str) -> Skeleton:
    """Parse an ASF document into a Skeleton.

    Raises MalformedAsf on missing sections, dangling hierarchy
    references or non-numeric fields; never returns a partial skeleton.
    """
    sections: dict[str, list] = {}
    current = None
    for lineno, parts in _tokens(text):
        if parts[0].startswith(":"):
            current = parts[0][1:].lower()
            sections.setdefault(current, [])
            if len(parts) > 1:
                sections[current].append((lineno, parts[1:]))
            continue
        if current is None:
            raise MalformedAsf(f"line {lineno}: content before any section")
        sections[current].append((lineno, parts))

    for required in ("units", "root", "bonedata", "hierarchy"):
        if required not in sections:
            raise MalformedAsf(f"missing :{required} section")

    angle_unit = "deg"
    length_scale = 1.0
    for lineno, parts in sections["units"]:
        if parts[0] == "angle" and len(parts) > 1:
            angle_unit = parts[1].lower()
        elif parts[0] == "length" and len(parts) > 1:
            length_scale = _floats(parts[1:], 1, lineno, "length unit")[0]

    name = "skeleton"
    for lineno, parts in sections.get("name", []):
        name = parts[0]

    root_order = tuple(d.lower() for d in ("TX", "TY", "TZ", "RX", "RY", "RZ"))
    root_axis_order = "XYZ"
    root_position = np.zeros(3)
    root_orientation = np.zeros(3)
    for lineno, parts in sections["root"]:
        key = parts[0].lower()
        if key == "order":
            root_order = tuple(d.lower() for d in parts[1:])
            bad = [d for d in root_order if d not in _VALID_DOF]
            if bad:
                raise MalformedAsf(f"line {lineno}: unknown root channel {bad[0]}")
        elif key == "axis":
            root_axis_order = parts[1].upper()
        elif key == "position":
            root_position = np.array(_floats(parts[1:], 3, lineno, "root position"))
        elif key == "orientation":
            root_orientation = np.array(_floats(parts[1:], 3, lineno, "root orientation"))

    bones = _parse_bonedata(sections["bonedata"], angle_unit)

    root = Joint(
        name="root",
        parent=-1,
        direction=np.zeros(3),
        length=0.0,
        axis=root_orientation if angle_unit != "rad" else np.degrees(root_orientation),
        axis_order=root_axis_order,
        dof=root_order,
    )
    joints = [root]
    index = {"root": 0}
    for lineno, parts in sections["hierarchy"]:
        if parts[0] in ("begin", "end"):
            continue
        parent_name, children = parts[0], parts[1:]
        if parent_name not in index:
            raise MalformedAsf(f"line {lineno}: hierarchy parent '{parent_name}' not placed yet")
        for child in children:
            if child not in bones:
                raise MalformedAsf(f"line {lineno}: hierarchy names undeclared bone '{child}'")
            if child in index:
                raise MalformedAsf(f"line {lineno}: bone '{child}' placed twice")
            bone = bones[child]
            index[child] = len(joints)
            joints.append(replace(bone, parent=index[parent_name]))

    return Skeleton(
        joints=tuple(joints),
        name=name,
        angle_unit="deg",
        length_scale=length_scale,
        root_position=root_position,
    )


def _parse_bonedata(lines, angle_unit: str) -> dict:
    bones: dict[str, Joint] = {}
    fields = None
    for lineno, parts in lines:
        key = parts[0].lower()
        if key == "begin":
            fields = {}
            continue
        if key == "end":
            if fields is None or "name" not in fields:
                raise MalformedAsf(f"line {lineno}: bone block without a name")
            bones[fields["name"]] = Joint(
                name=fields["name"],
                parent=-1,
                direction=_unit(fields.get("direction", np.zeros(3))),
                length=fields.get("length", 0.0),
                axis=fields.get("axis", np.zeros(3)),
                axis_order=fields.get("axis_order", "XYZ"),
                dof=fields.get("dof", ()),
            )
            fields = None
            continue
        if fields is None:
            # limits continuation lines outside a block would be malformed,
            # but parenthesised continuations inside one are tolerated below
            raise MalformedAsf(f"line {lineno}: bone data outside begin/end")
        if key == "id":
            continue
        if key == "name":
            fields["name"] = parts[1]
        elif key == "direction":
            fields["direction"] = np.array(_floats(parts[1:], 3, lineno, "direction"))
        elif key == "length":
            fields["length"] = _floats(parts[1:], 1, lineno, "length")[0]
            if fields["length"] < 0:
                raise MalformedAsf(f"line {lineno}: negative bone length")
        elif key == "axis":
            vals = _floats(parts[1:], 3, lineno, "axis")
            axis = np.array(vals)
            if angle_unit == "rad":
                axis = np.degrees(axis)
            fields["axis"] = axis
            if len(parts) > 4:
                fields["axis_order"] = parts[4].upper()
        elif key == "dof":
            dof = tuple(d.lower() for d in parts[1:])
            bad = [d for d in dof if d not in _VALID_DOF]
            if bad:
                raise MalformedAsf(f"line {lineno}: unknown dof '{bad[0]}'")
            fields["dof"] = dof
        elif key == "limits" or parts[0].startswith("("):
            continue  # limits do not affect kinematics
        else:
            raise MalformedAsf(f"line {lineno}: unknown bone field '{parts[0]}'")
    return bones


def write_asf(skeleton: Skeleton) -> str:
    """Serialize a Skeleton back to ASF text (6-decimal fixed point)."""
    out = [":version 1.10", f":name {skeleton.name}", ":units"]
    out.append("  mass 1.0")
    out.append(f"  length {skeleton.length_scale:g}")
    out.append("  angle deg")
    out.append(":documentation")
    root = skeleton.joints[0]
    out.append(":root")
    out.append("  order " + " ".join(d.upper() for d in root.dof))
    out.append(f"  axis {root.axis_order}")
    out.append("  position " + " ".join(f"{v:.6f}" for v in skeleton.root_position))
    out.append("  orientation " + " ".join(f"{v:.6f}" for v in root.axis))
    out.append(":bonedata")
    for i, joint in enumerate(skeleton.joints[1:], start=1):
        out.append("  begin")
        out.append(f"    id {i}")
        out.append(f"    name {joint.name}")
        out.append("    direction " + " ".join(f"{v:.6f}" for v in joint.direction))
        out.append(f"    length {joint.length:.6f}")
        out.append(
            "    axis "
            + " ".join(f"{v:.6f}" for v in joint.axis)
            + f"  {joint.axis_order}"
        )
        if joint.dof:
            out.append("    dof " + " ".join(joint.dof))
        out.append("  end")
    out.append(":hierarchy")
    out.append("  begin")
    children: dict[int, list[int]] = {}
    for i, joint in enumerate(skeleton.joints):
        if joint.parent >= 0:
            children.setdefault(joint.parent, []).append(i)
    # lines ordered by first child so a reparse reproduces the joint order
    for parent in sorted(children, key=lambda p: children[p][0]):
        names = " ".join(skeleton.joints[c].name for c in children[parent])
        out.append("    " + skeleton.joints[parent].name + " " + names)
    out.append("  end")
    return "\n".join(out) + "\n"


def parse_amc(text: str, skeleton: Skeleton) -> MotionSequence:
    """Parse an AMC document against a skeleton.

    Frames must be numbered contiguously from 1 and every frame must
    supply exactly the declared dof values for every animated joint.
    Raises MalformedAmc otherwise.
    """
    animated = {j.name: len(j.dof) for j in skeleton.joints if j.dof}
    per_joint: dict[str, list] = {n: [] for n in animated}
    expected_frame = 1
    seen_in_frame: set = set()
    in_frame = False

    def close_frame(lineno):
        missing = set(animated) - seen_in_frame
        if missing:
            raise MalformedAmc(
                f"line {lineno}: frame {expected_frame - 1} missing joints "
                f"{sorted(missing)}"
            )

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(":"):
            continue
        parts = line.split()
        if len(parts) == 1 and parts[0].lstrip("-").isdigit():
            number = int(parts[0])
            if in_frame:
                close_frame(lineno)
            if number != expected_frame:
                raise MalformedAmc(
                    f"line {lineno}: frame number {number}, expected {expected_frame}"
                )
            expected_frame += 1
            seen_in_frame = set()
            in_frame = True
            continue
        if not in_frame:
            raise MalformedAmc(f"line {lineno}: channel data before first frame number")
        name = parts[0]
        if name not in animated:
            raise MalformedAmc(f"line {lineno}: unknown bone '{name}'")
        if name in seen_in_frame:
            raise MalformedAmc(f"line {lineno}: duplicate bone '{name}' in frame")
        try:
            vals = [float(p) for p in parts[1:]]
        except ValueError:
            raise MalformedAmc(f"line {lineno}: non-numeric value for '{name}'") from None
        if len(vals) != animated[name]:
            raise MalformedAmc(
                f"line {lineno}: bone '{name}' has {len(vals)} values, "
                f"expected {animated[name]}"
            )
        per_joint[name].append(vals)
        seen_in_frame.add(name)

    if in_frame:
        close_frame(lineno + 1)

    num_frames = expected_frame - 1 if in_frame else 0
    values = {
        n: np.array(rows, dtype=float).reshape(num_frames, animated[n])
        for n, rows in per_joint.items()
    }
    return MotionSequence(skeleton=skeleton, values=values)


def _fmt_channel(v: float) -> str:
    """6-decimal fixed point with trailing zeros stripped; zeros print '0'."""
    if v == 0.0:
        return "0"
    s = f"{v:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def write_amc(motion: MotionSequence) -> str:
    """Serialize a MotionSequence to AMC text.

    Values are printed with at most 6 fixed decimals, which makes a
    second parse/write round trip byte-stable; a normalized motion's
    root line reads ``root 0 0 0 0 0 0``.
    """
    out = ["#!gaitbench", ":FULLY-SPECIFIED", ":DEGREES"]
    names = [j.name for j in motion.skeleton.joints if j.dof]
    for t in range(motion.num_frames):
        out.append(str(t + 1))
        for name in names:
            row = motion.values[name][t]
            out.append(name + " " + " ".join(_fmt_channel(v) for v in row))
    return "\n".join(out) + "\n"


def mean_skeleton(skeletons) -> Skeleton:
    """Average a collection of structurally identical skeletons.

    Bone lengths and axis angles are averaged componentwise; direction
    vectors are averaged then renormalized to unit length, preserving the
    unit-direction invariant.  Raises HeterogeneousTopology if the
    hierarchies differ.
    """
    skeletons = list(skeletons)
    if not skeletons:
        raise ValueError("mean_skeleton needs at least one skeleton")
    signature = skeletons[0].topology_signature()
    for sk in skeletons[1:]:
        if sk.topology_signature() != signature:
            raise HeterogeneousTopology("skeletons differ in hierarchy or dof layout")

    joints = []
    for i in range(skeletons[0].num_joints):
        group = [sk.joints[i] for sk in skeletons]
        direction = _unit(np.mean([j.direction for j in group], axis=0))
        joints.append(
            replace(
                group[0],
                direction=direction,
                length=float(np.mean([j.length for j in group])),
                axis=np.mean([j.axis for j in group], axis=0),
            )
        )
    return replace(
        skeletons[0],
        joints=tuple(joints),
        root_position=np.mean([sk.root_position for sk in skeletons], axis=0),
    )
