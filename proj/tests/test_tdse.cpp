#include <cmath>
#include <random>

#include <doctest.h>

#include "mirrorfall/analytic.hpp"
#include "mirrorfall/errors.hpp"
#include "mirrorfall/tdse.hpp"

using namespace mirrorfall;

namespace {

PhysicalParams mirror_params() {
  PhysicalParams p = sodium_params();
  p.barrier_height = kMirrorHeight;
  return p;
}

SolverConfig at(std::vector<double> times) {
  SolverConfig c;
  c.snapshot_times = std::move(times);
  return c;
}

}  // namespace

TEST_CASE("tridiagonal solver matches a direct residual") {
  const std::size_t n = 50;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Complex> d(n);
  for (auto& x : d) x = Complex(4.0 + u(rng), u(rng));
  const Complex c(-1.0, 0.3);
  std::vector<Complex> b(n);
  for (auto& x : b) x = Complex(u(rng), u(rng));
  TridiagonalSolver solver(d, c);
  std::vector<Complex> x = b;
  solver.solve(x);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Complex r = d[i] * x[i] - b[i];
    if (i > 0) r += c * x[i - 1];
    if (i + 1 < n) r += c * x[i + 1];
    worst = std::max(worst, std::abs(r));
  }
  CHECK(worst <= 1e-13);

  // Partial refactorization equals a fresh factorization.
  for (std::size_t i = 30; i < n; ++i) d[i] += Complex(0.5, 0.1);
  solver.update(d, 30);
  TridiagonalSolver fresh(d, c);
  std::vector<Complex> x1 = b, x2 = b;
  solver.solve(x1);
  fresh.solve(x2);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(x1[i] - x2[i]) <= 1e-14);
  std::vector<Complex> wrong(n + 1);
  CHECK_THROWS_AS(solver.solve(wrong), ConfigError);
}

TEST_CASE("free fall matches the exact packet") {
  const PacketSpec s{-7.0, 0.35, 0.0};
  const PhysicalParams p = sodium_params();
  const double dz = default_spacing(s, p, 1.0, Frame::lab);
  const Grid g = default_grid(s, p, 1.0, dz, Frame::lab);
  const auto r = propagate(make_gaussian(s, g), p, at({0.5, 1.0}));
  REQUIRE(r.snapshots.size() == 2);
  for (const auto& f : r.snapshots) {
    const auto ref = FreeFallPacket(s, p).sample(g, f.time());
    CHECK(compare_fields(f, ref).linf_rel <= 5e-3);
  }
  CHECK(r.max_norm_drift <= 1e-10);
  CHECK(r.contract_ok);
  CHECK(r.drift.times.size() >= 2);
}

TEST_CASE("frames agree under the mirror") {
  const PacketSpec s{-7.0, 0.3, 0.0};
  const PhysicalParams p = mirror_params();
  std::vector<WaveField> out;
  for (Frame fr : {Frame::lab, Frame::free_fall}) {
    const double dz = default_spacing(s, p, 1.5, fr);
    const Grid g = default_grid(s, p, 1.5, dz, fr);
    SolverConfig c = at({1.5});
    c.frame = fr;
    const auto init = make_mirror_packet(s, g, p, fr == Frame::lab ? FaceModel::snapped : FaceModel::cell_fraction);
    out.push_back(propagate(init, p, c).snapshots.back());
  }
  CHECK(compare_fields(out[1], out[0]).l2_rel <= 0.01);
}

TEST_CASE("norm is conserved by the mirror run") {
  const PacketSpec s{-7.0, 0.3, 0.0};
  const PhysicalParams p = mirror_params();
  const double dz = default_spacing(s, p, 1.0, Frame::lab);
  const Grid g = default_grid(s, p, 1.0, dz, Frame::lab);
  const auto r = propagate(make_mirror_packet(s, g, p), p, at({1.0}));
  CHECK(r.max_norm_drift <= 1e-10);
  CHECK(r.max_energy_drift <= 0.02);
  // Nothing passes the mirror.
  const auto& f = r.snapshots.back();
  double above = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (g.z(i) > 0.5) above += std::norm(f[i]) * g.spacing();
  }
  CHECK(above <= 1e-10);
}

TEST_CASE("mean-field runs") {
  const PacketSpec s{-7.0, 0.3, 0.0};
  PhysicalParams p = mirror_params();
  PhysicalParams gp_params = p;
  gp_params.gp_strength = 25.0;
  const double dz = default_spacing(s, gp_params, 0.5, Frame::lab);
  const Grid g = default_grid(s, gp_params, 0.5, dz, Frame::lab);
  const auto init = make_mirror_packet(s, g, p);
  SolverConfig c = at({0.5});
  c.dt = 1e-3;
  const auto lin = propagate(init, p, c);
  const auto same = propagate_gp(init, p, c);
  for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(lin.snapshots[0][i] == same.snapshots[0][i]);

  p.gp_strength = 25.0;
  CHECK_THROWS_AS(propagate(init, p, c), ConfigError);
  const auto gp = propagate_gp(init, p, c);
  CHECK(gp.max_norm_drift <= 1e-10);
  CHECK(gp.max_energy_drift <= 0.02);
  // Repulsion widens the packet.
  CHECK(gp.diagnostics[0].width_rms > lin.diagnostics[0].width_rms);
  p.gp_strength = -1.0;
  CHECK_THROWS_AS(propagate_gp(init, p, c), ConfigError);
}

TEST_CASE("coarse step is refused before integrating") {
  const PacketSpec s{-7.0, 0.3, 0.0};
  const PhysicalParams p = mirror_params();
  const Grid g = default_grid(s, p, 1.0, default_spacing(s, p, 1.0, Frame::lab), Frame::lab);
  const auto init = make_mirror_packet(s, g, p);
  SolverConfig c = at({1.0});
  c.dt = 100.0 * default_time_step(init, p, Frame::lab);
  try {
    propagate(init, p, c);
    FAIL("expected AccuracyError");
  } catch (const AccuracyError& e) {
    CHECK(e.history().times.empty());
  }
}

TEST_CASE("drift contract") {
  const PacketSpec s{-7.0, 0.3, 0.0};
  const PhysicalParams p = mirror_params();
  const Grid g = default_grid(s, p, 0.5, default_spacing(s, p, 0.5, Frame::lab), Frame::lab);
  const auto init = make_mirror_packet(s, g, p);
  SolverConfig c = at({0.5});
  c.energy_tolerance = 1e-12;
  CHECK_THROWS_AS(propagate(init, p, c), AccuracyError);
  c.enforce_contract = false;
  const auto r = propagate(init, p, c);
  CHECK_FALSE(r.contract_ok);
  CHECK(r.snapshots.size() == 1);
}

TEST_CASE("packet reaching the edge is reported") {
  const PacketSpec s{-7.0, 0.3, 0.0};
  const PhysicalParams p = sodium_params();
  const Grid g(-12.0, -2.0, 2001);
  CHECK_THROWS_AS(propagate(make_gaussian(s, g), p, at({2.0})), DomainTooSmallError);
}

TEST_CASE("configuration errors") {
  const PacketSpec s{-7.0, 0.3, 0.0};
  const PhysicalParams p = sodium_params();
  const Grid g(-12.0, -2.0, 2001);
  const auto init = make_gaussian(s, g);
  CHECK_THROWS_AS(propagate(init, p, at({})), ConfigError);
  CHECK_THROWS_AS(propagate(init, p, at({0.2, 0.1})), ConfigError);
  CHECK_THROWS_AS(propagate(init, p, at({-1.0})), ConfigError);
  std::vector<Complex> twice(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) twice[i] = 2.0 * init[i];
  CHECK_THROWS_AS(propagate(WaveField(g, twice), p, at({0.1})), ConfigError);
}

TEST_CASE("snapshots land exactly on the requested times") {
  const PacketSpec s{-7.0, 0.35, 0.0};
  const PhysicalParams p = sodium_params();
  const Grid g = default_grid(s, p, 0.3, default_spacing(s, p, 0.3, Frame::lab), Frame::lab);
  SolverConfig c = at({0.0, 0.1234, 0.3});
  c.dt = 1e-3;
  const auto r = propagate(make_gaussian(s, g), p, c);
  CHECK(r.snapshots[0].time() == 0.0);
  CHECK(r.snapshots[1].time() == 0.1234);
  CHECK(r.snapshots[2].time() == 0.3);
  const auto ref = FreeFallPacket(s, p).sample(g, 0.1234);
  CHECK(compare_fields(r.snapshots[1], ref).linf_rel <= 1e-3);
}

TEST_CASE("deterministic repeat") {
  const PacketSpec s{-7.0, 0.3, 0.0};
  const PhysicalParams p = mirror_params();
  const Grid g = default_grid(s, p, 0.3, default_spacing(s, p, 0.3, Frame::lab), Frame::lab);
  const auto init = make_mirror_packet(s, g, p);
  const auto a = propagate(init, p, at({0.3}));
  const auto b = propagate(init, p, at({0.3}));
  for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(a.snapshots[0][i] == b.snapshots[0][i]);
}

TEST_CASE("default step and spacing") {
  const PacketSpec s{-7.0, 0.3, 0.0};
  const PhysicalParams p = mirror_params();
  const double dz = default_spacing(s, p, 4.0, Frame::lab);
  CHECK(dz <= 0.03);
  CHECK(dz <= 1.0 / std::sqrt(2.0 * p.mass * p.barrier_height) / 4.0);
  const Grid g = default_grid(s, p, 4.0, dz, Frame::lab);
  CHECK(g.z_max() == doctest::Approx(p.barrier_top() + 5.0));
  CHECK(g.z_min() < -7.0 - 9.8 * 8.0);
  const auto init = make_mirror_packet(s, g, p);
  const double dt = default_time_step(init, p, Frame::lab);
  CHECK(dt > 0.0);
  CHECK(dt <= 1e-3);
  const auto hs = hamiltonian_spread(init, p, Frame::lab);
  CHECK(hs.mean == doctest::Approx(gaussian_energy(s, p)).epsilon(1e-3));
  CHECK(hs.spread > 0.0);
}

TEST_CASE("convergence orders on free fall") {
  const PacketSpec s{-7.0, 0.35, 0.0};
  const PhysicalParams p = sodium_params();
  const Grid base(-21.0, 5.0, 521);
  SolverConfig c = at({0.25});
  c.dt = 0.01;
  const auto oracle = [&](const Grid& g, double t) { return FreeFallPacket(s, p).sample(g, t); };
  const auto rep = convergence_study(s, p, base, c, 4, oracle);
  CHECK_FALSE(rep.inconclusive);
  CHECK(rep.dt_order == doctest::Approx(2.0).epsilon(0.15));
  CHECK(rep.dz_order == doctest::Approx(2.0).epsilon(0.15));
  REQUIRE(rep.oracle_errors.size() == 4);
  for (std::size_t k = 1; k < 4; ++k) CHECK(rep.oracle_errors[k] < rep.oracle_errors[k - 1]);
  CHECK_THROWS_AS(convergence_study(s, p, base, c, 2), ConfigError);
}
