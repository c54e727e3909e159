// SPDX-License-Identifier: Apache-2.0
//
// Steering vectors, spatial-frequency partitions, dictionaries, and the
// inter-region phase-ramp translation.

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "dpbeam/array.hpp"
#include "dpbeam/rng.hpp"

using namespace dpbeam;

namespace {

constexpr double kPi = std::numbers::pi;

Vec random_unit(Rng& rng, int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = complex_normal(rng);
    return v / v.norm();
}

}  // namespace

TEST_CASE("unpaired steering closed forms") {
    const Vec d0 = steering_unpaired(SpatialFreq(0.0), 4);
    REQUIRE(d0.size() == 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(d0[k] - cxd(0.5, 0.0)) < 1e-15);
    }

    const Vec dpi = steering_unpaired(SpatialFreq(kPi), 2);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(dpi[0] - cxd(inv_sqrt2, 0.0)) < 1e-15);
    CHECK(std::abs(dpi[1] - cxd(-inv_sqrt2, 0.0)) < 1e-15);

    const Vec dq = steering_unpaired(SpatialFreq(kPi / 2.0), 4);
    CHECK(std::abs(dq[0] - cxd(0.5, 0.0)) < 1e-15);
    CHECK(std::abs(dq[1] - cxd(0.0, 0.5)) < 1e-15);
    CHECK(std::abs(dq[2] - cxd(-0.5, 0.0)) < 1e-15);
    CHECK(std::abs(dq[3] - cxd(0.0, -0.5)) < 1e-15);
}

TEST_CASE("unpaired steering has unit norm and 2*pi periodicity") {
    Rng rng = make_rng(11);
    for (int t = 0; t < 50; ++t) {
        const double psi = uniform_real(rng, -10.0, 10.0);
        const int m = 1 + int(uniform_real(rng, 0.0, 15.999));
        const Vec d = steering_unpaired(SpatialFreq(psi), m);
        CHECK(std::abs(d.norm() - 1.0) < 1e-12);
        const Vec d2 = steering_unpaired(SpatialFreq(psi + 2.0 * kPi), m);
        CHECK((d - d2).norm() < 1e-12);
    }
    CHECK_THROWS_AS(steering_unpaired(SpatialFreq(0.0), 0), config_error);
}

TEST_CASE("paired steering closed forms") {
    const ArrayGeometry g22(2, 2);
    const Vec a = steering_paired(0.0, 0.0, g22);
    REQUIRE(a.size() == 4);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(a[k] - cxd(0.5, 0.0)) < 1e-15);

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Vec b = steering_paired(kPi / 2.0, 0.0, ArrayGeometry(2, 1));
    CHECK(std::abs(b[0] - cxd(inv_sqrt2, 0.0)) < 1e-12);
    CHECK(std::abs(b[1] - cxd(-inv_sqrt2, 0.0)) < 1e-12);

    const Vec c = steering_paired(0.0, kPi / 2.0, ArrayGeometry(1, 2));
    CHECK(std::abs(c[0] - cxd(inv_sqrt2, 0.0)) < 1e-12);
    CHECK(std::abs(c[1] - cxd(-inv_sqrt2, 0.0)) < 1e-12);
}

TEST_CASE("paired steering factors as azimuth (x) elevation with vertical fastest") {
    Rng rng = make_rng(12);
    const ArrayGeometry geom(3, 5);
    for (int t = 0; t < 20; ++t) {
        const double az = uniform_real(rng, -1.5, 1.5);
        const double el = uniform_real(rng, -0.7, 0.7);
        const Vec lhs = steering_paired(az, el, geom);
        const Vec dh = steering_unpaired(paired_az_freq(az, el), geom.m_h);
        const Vec dv = steering_unpaired(paired_el_freq(el), geom.m_v);
        const Vec rhs = kron(dh, dv);
        CHECK((lhs - rhs).norm() < 1e-12);
        // Element layout: index ih*m_v + iv (vertical index fastest).
        CHECK(std::abs(lhs[1 * geom.m_v + 0] -
                       dh[1] * dv[0]) < 1e-12);
    }
}

TEST_CASE("paired spatial frequencies reduce to the unpaired ones at zero elevation") {
    Rng rng = make_rng(13);
    for (int t = 0; t < 20; ++t) {
        const double az = uniform_real(rng, -1.5, 1.5);
        CHECK(paired_az_freq(az, 0.0).rad == doctest::Approx(kPi * std::sin(az)).epsilon(1e-12));
        CHECK(paired_el_freq(0.0).rad == doctest::Approx(0.0).epsilon(1e-12));
    }
    // Elevation coverage (-pi/4, pi/4) maps into (-pi/sqrt(2), pi/sqrt(2)).
    CHECK(paired_el_freq(kPi / 4.0).rad ==
          doctest::Approx(kPi / kElevationCompression).epsilon(1e-12));
    CHECK(paired_el_freq(-kPi / 4.0).rad ==
          doctest::Approx(-kPi / kElevationCompression).epsilon(1e-12));
}

TEST_CASE("steering_panel matches the Kronecker of its axes") {
    const ArrayGeometry geom(4, 2);
    Rng rng = make_rng(14);
    for (int t = 0; t < 20; ++t) {
        const double ph = uniform_real(rng, -kPi, kPi);
        const double pv = uniform_real(rng, -kPi, kPi);
        const Vec lhs = steering_panel(SpatialFreq(ph), SpatialFreq(pv), geom);
        const Vec rhs = kron(steering_unpaired(SpatialFreq(ph), 4),
                             steering_unpaired(SpatialFreq(pv), 2));
        CHECK((lhs - rhs).norm() < 1e-13);
    }
}

TEST_CASE("region bounds and centers follow the uniform partition") {
    const RegionPartition part(4, 3, 2, 2);
    CHECK(part.region_count() == 12);
    CHECK(part.sections_per_region() == 4);
    CHECK(part.section_count() == 48);

    for (int p = 1; p <= 4; ++p) {
        const auto [lo, hi] = part.az_bounds(p);
        CHECK(lo == doctest::Approx(-kPi + 2.0 * kPi * (p - 1) / 4.0).epsilon(1e-14));
        CHECK(hi == doctest::Approx(-kPi + 2.0 * kPi * p / 4.0).epsilon(1e-14));
        CHECK(part.az_region_center(p).rad == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-12));
    }
    const double el_span = 2.0 * kPi / kElevationCompression;
    for (int q = 1; q <= 3; ++q) {
        const auto [lo, hi] = part.el_bounds(q);
        CHECK(lo == doctest::Approx(-kPi / kElevationCompression + el_span * (q - 1) / 3.0)
                        .epsilon(1e-14));
        CHECK(hi == doctest::Approx(-kPi / kElevationCompression + el_span * q / 3.0)
                        .epsilon(1e-14));
        CHECK(part.el_region_center(q).rad == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(RegionPartition(0, 1, 1, 1), config_error);
    CHECK_THROWS_AS(ArrayGeometry(0, 2), config_error);
}

TEST_CASE("section indexing round-trips") {
    const RegionPartition part(3, 2, 2, 4);
    // Flat index: vertical section fastest.
    CHECK(part.section_flat_index(0, 0) == 0);
    CHECK(part.section_flat_index(0, 1) == 1);
    CHECK(part.section_flat_index(1, 0) == part.q_v * part.l_v);

    for (int p = 1; p <= part.q_h; ++p) {
        for (int q = 1; q <= part.q_v; ++q) {
            const auto idx = part.region_section_indices(p, q);
            CHECK(int(idx.size()) == part.sections_per_region());
            for (int flat : idx) {
                const auto [pp, qq] = part.region_of_section(flat);
                CHECK(pp == p);
                CHECK(qq == q);
            }
        }
    }
    CHECK(part.region_flat_index(1, 1) == 0);
    CHECK(part.region_flat_index(2, 1) == part.q_v);
}

TEST_CASE("dictionary columns sit at the uniform section centers") {
    // Single section: center of the full circle partition is zero frequency.
    const DictionarySet d1 = build_dictionaries(ArrayGeometry(2, 1), RegionPartition(1, 1, 1, 1));
    REQUIRE(d1.d_h.cols() == 1);
    CHECK((d1.d_h.col(0) - steering_unpaired(SpatialFreq(0.0), 2)).norm() < 1e-14);

    // q_h = 2, l_h = 2 on a 4-element axis: centers at -3pi/4, -pi/4, pi/4, 3pi/4.
    const DictionarySet d2 = build_dictionaries(ArrayGeometry(4, 1), RegionPartition(2, 1, 2, 1));
    REQUIRE(d2.d_h.cols() == 4);
    const double expected[4] = {-0.75 * kPi, -0.25 * kPi, 0.25 * kPi, 0.75 * kPi};
    for (int k = 0; k < 4; ++k) {
        CHECK(d2.part.az_section_center(k).rad == doctest::Approx(expected[k]).epsilon(1e-14));
        CHECK((d2.d_h.col(k) - steering_unpaired(SpatialFreq(expected[k]), 4)).norm() < 1e-13);
        CHECK(std::abs(d2.d_h.col(k).norm() - 1.0) < 1e-13);
    }

    // Elevation centers follow the compressed span.
    const DictionarySet d3 = build_dictionaries(ArrayGeometry(1, 4), RegionPartition(1, 2, 1, 2));
    const double lo = -kPi / kElevationCompression;
    const double step = 2.0 * kPi / (kElevationCompression * 4.0);
    for (int k = 0; k < 4; ++k) {
        CHECK(d3.part.el_section_center(k).rad ==
              doctest::Approx(lo + 0.5 * step + k * step).epsilon(1e-13));
    }

    // Full dictionary is the Kronecker of the axis dictionaries.
    const DictionarySet d4 = build_dictionaries(ArrayGeometry(4, 2), RegionPartition(2, 2, 2, 3));
    REQUIRE(d4.d.cols() == d4.part.section_count());
    for (int kh = 0; kh < d4.part.q_h * d4.part.l_h; ++kh) {
        for (int kv = 0; kv < d4.part.q_v * d4.part.l_v; ++kv) {
            const int flat = d4.part.section_flat_index(kh, kv);
            const Vec expect = kron(Vec(d4.d_h.col(kh)), Vec(d4.d_v.col(kv)));
            CHECK((d4.d.col(flat) - expect).norm() < 1e-13);
        }
    }

    // Region blocks pull out exactly the in-region columns.
    const Mat blk = d4.d_block(2, 1);
    const auto idx = d4.part.region_section_indices(2, 1);
    REQUIRE(blk.cols() == int(idx.size()));
    for (int j = 0; j < blk.cols(); ++j) {
        CHECK((blk.col(j) - d4.d.col(idx[j])).norm() == 0.0);
    }
}

TEST_CASE("oversampled single-region azimuth dictionary is a tight frame") {
    // q_h = 1 with q_h*l_h >= m_h: D_h D_h^H = (l_h/m_h) I.
    const DictionarySet d = build_dictionaries(ArrayGeometry(4, 1), RegionPartition(1, 1, 8, 1));
    const Mat gram = d.d_h * d.d_h.adjoint();
    const Mat expect = (8.0 / 4.0) * Mat::Identity(4, 4);
    CHECK((gram - expect).norm() < 1e-10);
}

TEST_CASE("region transform is the identity at (1,1) and a pure phase ramp elsewhere") {
    const ArrayGeometry geom(2, 1);
    const RegionPartition part(2, 1, 1, 1);
    Vec c(2);
    c << cxd(1.0, 0.0), cxd(1.0, 0.0);
    c /= c.norm();

    const Vec same = region_transform(c, 1, 1, geom, part);
    CHECK((same - c).norm() == 0.0);

    // p = 2 with q_h = 2: azimuth offset 2*pi*(p-1)/q_h = pi, ramp e^{j*pi*ih}.
    const Vec moved = region_transform(c, 2, 1, geom, part);
    CHECK(std::abs(moved[0] - c[0]) < 1e-15);
    CHECK(std::abs(moved[1] + c[1]) < 1e-15);
    CHECK(moved.norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("region transform preserves norm and translates the response exactly") {
    const ArrayGeometry geom(4, 3);
    const RegionPartition part(3, 2, 2, 2);
    Rng rng = make_rng(15);
    for (int t = 0; t < 25; ++t) {
        const Vec c = random_unit(rng, geom.panel_size());
        const int p = 1 + int(uniform_real(rng, 0.0, 2.999));
        const int q = 1 + int(uniform_real(rng, 0.0, 1.999));
        const Vec ct = region_transform(c, p, q, geom, part);
        CHECK(std::abs(ct.norm() - 1.0) < 1e-13);

        const double dh = 2.0 * kPi * (p - 1) / part.q_h;
        const double dv = 2.0 * kPi * (q - 1) / (kElevationCompression * part.q_v);
        const double ph = uniform_real(rng, -2.0, 2.0);
        const double pv = uniform_real(rng, -1.0, 1.0);
        const cxd before = steering_panel(SpatialFreq(ph), SpatialFreq(pv), geom).dot(c);
        const cxd after =
            steering_panel(SpatialFreq(ph + dh), SpatialFreq(pv + dv), geom).dot(ct);
        CHECK(std::abs(std::abs(before) - std::abs(after)) < 1e-12);
    }
}

TEST_CASE("region transform moves the response peak into the target region") {
    const ArrayGeometry geom(8, 4);
    const RegionPartition part(4, 2, 1, 1);
    // Beam at the (1,1) region center.
    const Vec c = steering_panel(part.az_region_center(1), part.el_region_center(1), geom);
    for (int p = 1; p <= 4; ++p) {
        for (int q = 1; q <= 2; ++q) {
            const Vec ct = region_transform(c, p, q, geom, part);
            // Scan all region centers; the peak must be at (p, q).
            double best = -1.0;
            int best_p = 0, best_q = 0;
            for (int pp = 1; pp <= 4; ++pp) {
                for (int qq = 1; qq <= 2; ++qq) {
                    const Vec probe =
                        steering_panel(part.az_region_center(pp), part.el_region_center(qq), geom);
                    const double g = std::abs(probe.dot(ct));
                    if (g > best) {
                        best = g;
                        best_p = pp;
                        best_q = qq;
                    }
                }
            }
            CHECK(best_p == p);
            CHECK(best_q == q);
        }
    }
}

TEST_CASE("kron helpers follow the standard layout") {
    Mat a(2, 1), b(1, 2);
    a << cxd(1, 0), cxd(0, 1);
    b << cxd(2, 0), cxd(0, -1);
    const Mat k = kron(a, b);
    REQUIRE(k.rows() == 2);
    REQUIRE(k.cols() == 2);
    CHECK(std::abs(k(0, 0) - cxd(2, 0)) == 0.0);
    CHECK(std::abs(k(0, 1) - cxd(0, -1)) == 0.0);
    CHECK(std::abs(k(1, 0) - cxd(0, 2)) == 0.0);
    CHECK(std::abs(k(1, 1) - cxd(1, 0)) == 0.0);

    Vec u(2), v(2);
    u << cxd(1, 0), cxd(2, 0);
    v << cxd(0, 1), cxd(1, 0);
    const Vec w = kron(u, v);
    REQUIRE(w.size() == 4);
    CHECK(std::abs(w[0] - cxd(0, 1)) == 0.0);
    CHECK(std::abs(w[1] - cxd(1, 0)) == 0.0);
    CHECK(std::abs(w[2] - cxd(0, 2)) == 0.0);
    CHECK(std::abs(w[3] - cxd(2, 0)) == 0.0);
}
