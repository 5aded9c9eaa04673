import numpy as np
import pytest

from postgrasp import (
    ChainModel,
    JointSpec,
    LinkSpec,
    Pose,
    Rotation,
    forward_kinematics,
    geometric_jacobian,
    link_frames,
)

from oracles import TwoRParams, finite_difference_jacobian, two_r_closed_form
from conftest import make_two_r


def unit_two_r():
    return make_two_r(TwoRParams())


def prismatic_z(mass=2.0):
    return ChainModel(
        joints=(JointSpec(kind="prismatic", axis=(0, 0, 1)),),
        links=(LinkSpec(mass=mass, com=(0, 0, 0), inertia=np.zeros((3, 3))),),
    )


class TestForwardKinematics:
    def test_two_r_straight(self):
        pose = forward_kinematics(unit_two_r(), [0.0, 0.0])
        assert np.abs(pose.translation - np.array([2.0, 0.0, 0.0])).max() <= 1e-12
        assert pose.rotation.angle_to(Rotation.identity()) <= 1e-12

    def test_two_r_first_joint_quarter_turn(self):
        pose = forward_kinematics(unit_two_r(), [np.pi / 2, 0.0])
        assert np.abs(pose.translation - np.array([0.0, 2.0, 0.0])).max() <= 1e-12

    def test_two_r_matches_closed_form(self, two_r_params, two_r_model, rng):
        for _ in range(200):
            q = rng.uniform(-np.pi, np.pi, 2)
            oracle = two_r_closed_form(two_r_params, q)
            pose = forward_kinematics(two_r_model, q)
            assert np.abs(pose.translation - oracle["tip"]).max() <= 1e-12
            assert pose.rotation.angle_to(Rotation.rot_z(oracle["angle"])) <= 1e-9

    def test_prismatic_translates_along_axis(self):
        model = prismatic_z()
        pose = forward_kinematics(model, [0.3])
        assert np.abs(pose.translation - np.array([0.0, 0.0, 0.3])).max() <= 1e-15

    def test_base_pose_offsets_everything(self, rng):
        base = Pose(Rotation.rot_z(0.7), np.array([0.1, 0.2, 0.3]))
        model = ChainModel(
            joints=unit_two_r().joints,
            links=unit_two_r().links,
            base_pose=base,
            tool_transform=unit_two_r().tool_transform,
        )
        q = rng.uniform(-1, 1, 2)
        expected = base.compose(forward_kinematics(unit_two_r(), q))
        got = forward_kinematics(model, q)
        assert np.abs(got.translation - expected.translation).max() <= 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            forward_kinematics(unit_two_r(), [0.1])


class TestGeometricJacobian:
    def test_two_r_straight_config(self):
        jac = geometric_jacobian(unit_two_r(), [0.0, 0.0])
        assert np.abs(jac[0] - np.array([0.0, 0.0])).max() <= 1e-12
        assert np.abs(jac[1] - np.array([2.0, 1.0])).max() <= 1e-12
        assert np.abs(jac[5] - np.array([1.0, 1.0])).max() <= 1e-12

    def test_matches_closed_form(self, two_r_params, two_r_model, rng):
        for _ in range(100):
            q = rng.uniform(-np.pi, np.pi, 2)
            assert np.abs(
                geometric_jacobian(two_r_model, q) - two_r_closed_form(two_r_params, q)["J"]
            ).max() <= 1e-12

    def test_prismatic_column_has_no_angular_part(self):
        jac = geometric_jacobian(prismatic_z(), [0.2])
        assert np.abs(jac[3:, 0]).max() == 0.0
        assert np.abs(jac[:3, 0] - np.array([0, 0, 1.0])).max() <= 1e-15

    def test_shape(self, arm7):
        assert geometric_jacobian(arm7, np.zeros(7)).shape == (6, 7)

    def test_finite_difference_check(self, arm7, rng):
        # linear rows against FD of the tool position, angular rows against
        # FD of the rotation log
        def tool_pos(q):
            return forward_kinematics(arm7, q).translation

        for _ in range(10):
            q = rng.uniform(-1.2, 1.2, 7)
            jac = geometric_jacobian(arm7, q)
            jac_fd = finite_difference_jacobian(tool_pos, q, 1e-7)
            scale = max(1.0, np.abs(jac[:3]).max())
            assert np.abs(jac[:3] - jac_fd).max() / scale <= 1e-5

            h = 1e-7
            for k in range(7):
                dq = np.zeros(7)
                dq[k] = h
                ra = forward_kinematics(arm7, q - dq).rotation
                rb = forward_kinematics(arm7, q + dq).rotation
                omega = (rb * ra.inverse()).log() / (2 * h)
                assert np.abs(jac[3:, k] - omega).max() <= 1e-5


class TestToolBodyMerge:
    def test_zero_mass_merge_is_noop(self, arm7):
        merged = arm7.with_tool_body(0.0, np.zeros(3), np.zeros((3, 3)))
        last, orig = merged.links[-1], arm7.links[-1]
        assert abs(last.mass - orig.mass) <= 1e-15
        assert np.abs(last.com - orig.com).max() <= 1e-15
        assert np.abs(last.inertia - orig.inertia).max() <= 1e-15

    def test_point_mass_merge_parallel_axis(self):
        # two point masses on a massless-frame link: combined inertia about
        # the joint CoM follows the parallel-axis theorem, hand-computed
        model = ChainModel(
            joints=(JointSpec(kind="revolute", axis=(0, 0, 1)),),
            links=(LinkSpec(mass=1.0, com=(1.0, 0, 0), inertia=np.zeros((3, 3))),),
            tool_transform=Pose.from_translation((2.0, 0.0, 0.0)),
        )
        merged = model.with_tool_body(1.0, np.zeros(3), np.zeros((3, 3)))
        link = merged.links[-1]
        assert abs(link.mass - 2.0) <= 1e-15
        assert np.abs(link.com - np.array([1.5, 0.0, 0.0])).max() <= 1e-15
        # two unit masses at +-0.5 from the common CoM: Izz = 2 * 0.25
        assert abs(link.inertia[2, 2] - 0.5) <= 1e-15
        assert abs(link.inertia[0, 0]) <= 1e-15


class TestValidation:
    def test_joint_axis_zero_rejected(self):
        with pytest.raises(ValueError):
            JointSpec(kind="revolute", axis=(0, 0, 0))

    def test_bad_kind_rejected(self):
        with pytest.raises(ValueError):
            JointSpec(kind="spherical", axis=(0, 0, 1))

    def test_bad_limits_rejected(self):
        with pytest.raises(ValueError):
            JointSpec(kind="revolute", axis=(0, 0, 1), limits=(1.0, -1.0))

    def test_negative_mass_rejected(self):
        with pytest.raises(ValueError):
            LinkSpec(mass=-0.1, com=np.zeros(3), inertia=np.zeros((3, 3)))

    def test_asymmetric_inertia_rejected(self):
        bad = np.zeros((3, 3))
        bad[0, 1] = 0.2
        with pytest.raises(ValueError):
            LinkSpec(mass=1.0, com=np.zeros(3), inertia=bad)

    def test_triangle_inequality_violation_rejected(self):
        with pytest.raises(ValueError):
            LinkSpec(mass=1.0, com=np.zeros(3), inertia=np.diag([0.1, 0.1, 0.5]))

    def test_empty_chain_rejected(self):
        with pytest.raises(ValueError):
            ChainModel(joints=(), links=())

    def test_link_count_mismatch_rejected(self):
        with pytest.raises(ValueError):
            ChainModel(
                joints=(JointSpec(kind="revolute", axis=(0, 0, 1)),),
                links=(),
            )

    def test_link_frames_length(self, arm7, rng):
        assert len(link_frames(arm7, rng.uniform(-1, 1, 7))) == 7
