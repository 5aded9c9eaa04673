import numpy as np
import pytest

from postgrasp import (
    Pose,
    Rotation,
    SpatialInertia,
    Twist,
    transform_spatial_inertia,
    transform_twist,
    velocity_transform,
)


def random_rotation(rng) -> Rotation:
    return Rotation.from_axis_angle(rng.normal(size=3), rng.uniform(-np.pi, np.pi))


def random_pose(rng) -> Pose:
    return Pose(random_rotation(rng), rng.uniform(-1.0, 1.0, 3))


class TestRotation:
    def test_constructor_normalizes(self, rng):
        for _ in range(200):
            q = rng.normal(size=4) * rng.uniform(0.1, 10)
            r = Rotation.from_quat(q)
            assert abs(np.linalg.norm(r.quat) - 1.0) <= 1e-12

    def test_composition_keeps_unit_norm(self, rng):
        r = Rotation.identity()
        for _ in range(500):
            r = r * random_rotation(rng)
            assert abs(np.linalg.norm(r.quat) - 1.0) <= 1e-12

    def test_canonical_w_nonnegative(self, rng):
        for _ in range(100):
            assert random_rotation(rng).w >= 0.0

    def test_matrix_is_special_orthogonal(self, rng):
        for _ in range(100):
            m = random_rotation(rng).as_matrix()
            assert np.abs(m @ m.T - np.eye(3)).max() <= 1e-12
            assert abs(np.linalg.det(m) - 1.0) <= 1e-12

    def test_matrix_round_trip(self, rng):
        for _ in range(100):
            r = random_rotation(rng)
            back = Rotation.from_matrix(r.as_matrix())
            assert np.abs(back.quat - r.quat).max() <= 1e-9

    def test_log_inverts_axis_angle(self, rng):
        for _ in range(100):
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            angle = rng.uniform(1e-8, np.pi - 1e-6)
            vec = Rotation.from_axis_angle(axis, angle).log()
            assert np.abs(vec - axis * angle).max() <= 1e-8 or np.abs(vec + axis * angle).max() <= 1e-8

    def test_slerp_endpoints_and_midpoint(self, rng):
        a = random_rotation(rng)
        b = random_rotation(rng)
        assert a.slerp(b, 0.0).angle_to(a) <= 1e-9
        assert a.slerp(b, 1.0).angle_to(b) <= 1e-9
        mid = a.slerp(b, 0.5)
        assert abs(mid.angle_to(a) - mid.angle_to(b)) <= 1e-9

    def test_zero_norm_rejected(self):
        with pytest.raises(ValueError):
            Rotation(0.0, 0.0, 0.0, 0.0)


class TestPose:
    def test_compose_identity(self, rng):
        p = random_pose(rng)
        q = Pose.identity().compose(p)
        assert np.abs(q.translation - p.translation).max() <= 1e-15
        assert q.rotation.angle_to(p.rotation) <= 1e-15

    def test_compose_rotz_then_translate(self):
        # rotating frame by 90 deg about z carries the unit-x offset to unit-y
        p = Pose.from_rotation(Rotation.rot_z(np.pi / 2)).compose(
            Pose.from_translation((1.0, 0.0, 0.0))
        )
        assert np.abs(p.translation - np.array([0.0, 1.0, 0.0])).max() <= 1e-12
        assert p.rotation.angle_to(Rotation.rot_z(np.pi / 2)) <= 1e-12

    def test_compose_matches_matrix_product(self, rng):
        for _ in range(100):
            a = random_pose(rng)
            b = random_pose(rng)
            assert np.abs(a.compose(b).to_matrix() - a.to_matrix() @ b.to_matrix()).max() <= 1e-12

    def test_compose_associative(self, rng):
        a, b, c = (random_pose(rng) for _ in range(3))
        left = a.compose(b).compose(c)
        right = a.compose(b.compose(c))
        assert np.abs(left.to_matrix() - right.to_matrix()).max() <= 1e-12

    def test_inverse_composes_to_identity(self, rng):
        for _ in range(100):
            p = random_pose(rng)
            m = p.compose(p.inverse()).to_matrix()
            assert np.abs(m - np.eye(4)).max() <= 1e-12

    def test_apply_matches_matrix(self, rng):
        p = random_pose(rng)
        x = rng.normal(size=3)
        expected = (p.to_matrix() @ np.append(x, 1.0))[:3]
        assert np.abs(p.apply(x) - expected).max() <= 1e-12


class TestVelocityTransform:
    def test_identity(self):
        assert np.array_equal(velocity_transform(Pose.identity()), np.eye(6))

    def test_pure_translation_couples_angular_to_linear(self):
        # oracle: rigid-body point velocity v = w x r, with r the vector
        # from the rotation center to the new reference point (-t here)
        d = 0.37
        t = np.array([0.0, 0.0, d])
        e = velocity_transform(Pose.from_translation(t))
        omega = np.array([1.3, 0.0, 0.0])
        tw = e @ np.concatenate([np.zeros(3), omega])
        v_expected = np.cross(omega, -t)
        assert np.abs(tw[:3] - v_expected).max() <= 1e-12
        assert np.abs(tw[3:] - omega).max() <= 1e-12

    def test_homomorphism(self, rng):
        for _ in range(50):
            a = random_pose(rng)
            b = random_pose(rng)
            lhs = velocity_transform(a.compose(b))
            rhs = velocity_transform(a) @ velocity_transform(b)
            assert np.abs(lhs - rhs).max() <= 1e-10

    def test_inverse_identity(self, rng):
        for _ in range(50):
            p = random_pose(rng)
            prod = velocity_transform(p) @ velocity_transform(p.inverse())
            assert np.abs(prod - np.eye(6)).max() <= 1e-10

    def test_transform_twist_round_trip(self, rng):
        p = random_pose(rng)
        tw = Twist(rng.normal(size=3), rng.normal(size=3))
        back = transform_twist(transform_twist(tw, p), p.inverse())
        assert np.abs(back.as_vector() - tw.as_vector()).max() <= 1e-12


class TestSpatialInertia:
    def test_transform_by_identity(self, rng):
        m = SpatialInertia.from_mass_inertia(1.7, np.diag([0.1, 0.2, 0.3]))
        out = transform_spatial_inertia(m, Pose.identity())
        assert np.abs(out.matrix - m.matrix).max() <= 1e-12

    def test_point_mass_parallel_axis(self, rng):
        # oracle: parallel-axis theorem for a point mass at offset r
        mass = 2.3
        r = np.array([0.2, -0.1, 0.4])
        # frame B sits at -r from the mass, i.e. the mass is at +r in B
        pose_mass_in_b = Pose.from_translation(-r)
        out = transform_spatial_inertia(SpatialInertia.point_mass(mass), pose_mass_in_b)
        expected_rot = mass * (float(r @ r) * np.eye(3) - np.outer(r, r))
        assert np.abs(out.matrix[3:, 3:] - expected_rot).max() <= 1e-12
        assert np.abs(out.matrix[:3, :3] - mass * np.eye(3)).max() <= 1e-12

    def test_kinetic_energy_invariant(self, rng):
        for _ in range(100):
            m = SpatialInertia.from_mass_com_inertia(
                rng.uniform(0.1, 3.0), rng.uniform(-0.3, 0.3, 3), np.diag(rng.uniform(0.01, 0.2, 3))
            )
            p = random_pose(rng)
            u1 = rng.normal(size=6)
            u2 = velocity_transform(p) @ u1
            ke1 = 0.5 * u1 @ m.matrix @ u1
            ke2 = 0.5 * u2 @ transform_spatial_inertia(m, p).matrix @ u2
            assert abs(ke1 - ke2) <= 1e-10 * max(1.0, abs(ke1))

    def test_rejects_non_symmetric(self):
        bad = np.eye(6)
        bad[0, 1] = 0.5
        with pytest.raises(ValueError):
            SpatialInertia(bad)

    def test_preserves_positive_definiteness(self, rng):
        for _ in range(50):
            a = rng.normal(size=(6, 6))
            spd = a @ a.T + 0.1 * np.eye(6)
            out = transform_spatial_inertia(SpatialInertia(spd), random_pose(rng))
            assert np.linalg.eigvalsh(out.matrix)[0] > 0.0

    def test_mass_com_round_trip(self, rng):
        mass, com = 1.4, np.array([0.05, -0.02, 0.11])
        inertia = np.diag([0.02, 0.03, 0.04])
        si = SpatialInertia.from_mass_com_inertia(mass, com, inertia)
        m2, c2, i2 = si.to_mass_com_inertia()
        assert abs(m2 - mass) <= 1e-12
        assert np.abs(c2 - com).max() <= 1e-12
        assert np.abs(i2 - inertia).max() <= 1e-12
