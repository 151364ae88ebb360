#ifndef CCTUNNEL_SWEEP_HPP
#define CCTUNNEL_SWEEP_HPP

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "cctunnel/oracle.hpp"
#include "cctunnel/vra.hpp"

// Grid sweeps over energy, field width, or field strength. Every grid
// point is solved independently (workers never share mutable state), so
// results are bitwise reproducible for any worker count. A point that
// fails to solve becomes a recorded gap, never an abort.

namespace cctunnel {

enum class Axis { energy, field_width, field_strength };
enum class SolverKind { vra, transfer_matrix, both };

struct GridSpec {
  double start = 0.0;  // abscissa offset; the grid excludes start itself
  double span = 1.0;
  int points = 800;

  void validate() const {
    if (points < 1) throw std::invalid_argument("points must be >= 1");
    if (!(span > 0.0)) throw std::invalid_argument("span must be > 0");
  }
  // i in [0, points): start + (i+1) span / points
  double value(int i) const { return start + (i + 1) * span / points; }
};

struct SweepPlan {
  ModelParams params;
  Axis axis = Axis::energy;
  GridSpec grid;
  // fixed (E - eps_1)/V0 for field_width and field_strength sweeps
  double energy_abscissa = 0.5;
  int incident_channel = 1;
  Spin incident_spin = Spin::up;
  SolverKind solver = SolverKind::vra;
  int n_segments = 2000;

  void validate() const {
    params.validate();
    grid.validate();
    if (incident_channel < 1 || incident_channel > params.n_max)
      throw std::invalid_argument("incident channel outside [1, n_max]");
    if (n_segments < 1) throw std::invalid_argument("n_segments must be >= 1");
  }
};

struct SweepPoint {
  double abscissa = 0.0;
  double energy = 0.0;
  bool ok = false;
  std::string error;
  int n_open = 0;
  // incident column of the probability matrices, composite layout of this
  // point's channel set (spin-major)
  Eigen::VectorXd p_transmit, p_reflect;
  double t_total = 0.0, r_total = 0.0;
  double unitarity_defect = 0.0;
  bool suspect = false;
  // populated when both solvers run
  Eigen::VectorXd ref_p_transmit, ref_p_reflect;
  double solver_deviation = 0.0;
};

struct SweepResult {
  SweepPlan plan;
  IntegratorConfig integrator;
  std::vector<SweepPoint> points;
  int max_open = 0;  // open channels at the top of the grid

  int ok_count() const {
    int n = 0;
    for (const auto& pt : points) n += pt.ok;
    return n;
  }
};

namespace detail {

inline unsigned resolve_thread_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested;
  if (n == 0) {
    n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
  }
  if (const char* env = std::getenv("CC_TUNNEL_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  if (jobs < n) n = static_cast<unsigned>(jobs);
  return std::max(1u, n);
}

// Model and total energy for one grid point.
inline std::pair<ModelParams, double> point_setup(const SweepPlan& plan, double x) {
  ModelParams p = plan.params;
  double abscissa_e = plan.energy_abscissa;
  switch (plan.axis) {
    case Axis::energy:
      abscissa_e = x;
      break;
    case Axis::field_width:
      p.b = x;
      break;
    case Axis::field_strength:
      p.u = x;
      break;
  }
  const double E = channel_energy(p, 1) + abscissa_e * p.V0;
  return {p, E};
}

inline void fill_from_record(SweepPoint& pt, const ScatteringRecord& rec, int c_in) {
  pt.n_open = rec.channels.n_open;
  pt.p_transmit = rec.p_transmit.col(c_in);
  pt.p_reflect = rec.p_reflect.col(c_in);
  pt.t_total = pt.p_transmit.sum();
  pt.r_total = pt.p_reflect.sum();
  pt.unitarity_defect = rec.unitarity_defect;
  pt.suspect = rec.suspect;
}

inline SweepPoint solve_point(const SweepPlan& plan, const IntegratorConfig& cfg,
                              int index) {
  SweepPoint pt;
  pt.abscissa = plan.grid.value(index);
  try {
    auto [p, E] = point_setup(plan, pt.abscissa);
    p.validate();
    pt.energy = E;
    const ChannelSet cs = open_channels(p, E);
    if (plan.incident_channel > cs.n_open)
      throw std::domain_error("incident channel closed at this energy");
    const int c_in = cs.composite(plan.incident_channel, plan.incident_spin);

    if (plan.solver == SolverKind::vra || plan.solver == SolverKind::both) {
      fill_from_record(pt, solve_amplitudes(E, p, cfg), c_in);
    }
    if (plan.solver == SolverKind::transfer_matrix) {
      fill_from_record(pt, transfer_matrix_solve(E, p, plan.n_segments), c_in);
    } else if (plan.solver == SolverKind::both) {
      const ScatteringRecord ref = transfer_matrix_solve(E, p, plan.n_segments);
      pt.ref_p_transmit = ref.p_transmit.col(c_in);
      pt.ref_p_reflect = ref.p_reflect.col(c_in);
      pt.solver_deviation =
          std::max((pt.p_transmit - pt.ref_p_transmit).cwiseAbs().maxCoeff(),
                   (pt.p_reflect - pt.ref_p_reflect).cwiseAbs().maxCoeff());
    }
    pt.ok = true;
  } catch (const std::exception& e) {
    pt.ok = false;
    pt.error = e.what();
  }
  return pt;
}

}  // namespace detail

inline SweepResult run_sweep(const SweepPlan& plan, const IntegratorConfig& cfg = {},
                             unsigned threads = 0) {
  plan.validate();
  SweepResult result;
  result.plan = plan;
  result.integrator = cfg;
  result.points.resize(plan.grid.points);

  {
    auto [p_top, e_top] = detail::point_setup(plan, plan.grid.value(plan.grid.points - 1));
    try {
      result.max_open = open_channels(p_top, e_top).n_open;
    } catch (const std::exception&) {
      result.max_open = 0;
    }
  }

  const unsigned n_threads =
      detail::resolve_thread_count(threads, static_cast<std::size_t>(plan.grid.points));
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= plan.grid.points) break;
      result.points[i] = detail::solve_point(plan, cfg, i);
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return result;
}

// Reruns every stride-th point with a finer discretization (max_step / 5
// for the amplitude solver, doubled segments for the reference solver) and
// returns the worst absolute probability deviation.
inline double convergence_check(const SweepResult& result, int stride = 10) {
  SweepPlan plan = result.plan;
  IntegratorConfig cfg = result.integrator;
  if (plan.solver == SolverKind::transfer_matrix) {
    plan.n_segments *= 2;
  } else {
    plan.solver = SolverKind::vra;
    cfg.max_step /= 5.0;
  }
  double worst = 0.0;
  for (int i = 0; i < plan.grid.points; i += std::max(1, stride)) {
    const SweepPoint& base = result.points[i];
    if (!base.ok) continue;
    const SweepPoint fine = detail::solve_point(plan, cfg, i);
    if (!fine.ok) continue;
    worst = std::max(worst, (fine.p_transmit - base.p_transmit).cwiseAbs().maxCoeff());
    worst = std::max(worst, (fine.p_reflect - base.p_reflect).cwiseAbs().maxCoeff());
  }
  return worst;
}

// Spin-resolved transmission accessors. Entries are keyed by the outgoing
// channel; "same"/"flip" are relative to the incident spin.
inline double transmit_same(const SweepPoint& pt, const SweepPlan& plan, int out_channel) {
  const int n = pt.n_open;
  const int block = plan.incident_spin == Spin::up ? 0 : n;
  return pt.p_transmit[block + out_channel - 1];
}

inline double transmit_flip(const SweepPoint& pt, const SweepPlan& plan, int out_channel) {
  const int n = pt.n_open;
  const int block = plan.incident_spin == Spin::up ? n : 0;
  return pt.p_transmit[block + out_channel - 1];
}

// Both spins, one outgoing channel.
inline double transmit_channel(const SweepPoint& pt, int out_channel) {
  return pt.p_transmit[out_channel - 1] + pt.p_transmit[pt.n_open + out_channel - 1];
}

struct Peak {
  double position = 0.0;
  double height = 0.0;
  double prominence = 0.0;
  double width = 0.0;  // at half prominence
  int index = 0;
};

// Local maxima with at least the requested prominence. Positions and
// heights are refined with a parabola through the three samples around the
// grid maximum; widths are measured at half prominence.
inline std::vector<Peak> find_peaks(const std::vector<double>& xs,
                                    const std::vector<double>& ys,
                                    double min_prominence = 0.01) {
  const int n = static_cast<int>(ys.size());
  if (n != static_cast<int>(xs.size())) throw std::invalid_argument("size mismatch");
  std::vector<Peak> peaks;
  int i = 1;
  while (i + 1 < n) {
    if (!(ys[i] > ys[i - 1])) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < n && ys[j + 1] == ys[i]) ++j;  // ride out plateaus
    if (j + 1 < n && ys[j + 1] < ys[i]) {
      const int p = (i + j) / 2;

      double left_min = ys[p];
      for (int t = p - 1; t >= 0; --t) {
        left_min = std::min(left_min, ys[t]);
        if (ys[t] > ys[p]) break;
      }
      double right_min = ys[p];
      for (int t = j + 1; t < n; ++t) {
        right_min = std::min(right_min, ys[t]);
        if (ys[t] > ys[p]) break;
      }
      const double prom = ys[p] - std::max(left_min, right_min);

      if (prom >= min_prominence) {
        Peak pk;
        pk.index = p;
        pk.prominence = prom;
        pk.position = xs[p];
        pk.height = ys[p];
        if (p > 0 && p + 1 < n && i == j) {
          const double denom = ys[p - 1] - 2.0 * ys[p] + ys[p + 1];
          if (denom < 0.0) {
            const double shift = 0.5 * (ys[p - 1] - ys[p + 1]) / denom;
            const double h = 0.5 * (xs[p + 1] - xs[p - 1]);
            pk.position = xs[p] + shift * h;
            pk.height = ys[p] - 0.25 * (ys[p - 1] - ys[p + 1]) * shift;
          }
        }
        const double half = pk.height - 0.5 * prom;
        double xl = xs.front();
        for (int t = p; t > 0; --t) {
          if (ys[t - 1] <= half) {
            const double f = (ys[t] - half) / (ys[t] - ys[t - 1]);
            xl = xs[t] - f * (xs[t] - xs[t - 1]);
            break;
          }
          xl = xs[t - 1];
        }
        double xr = xs.back();
        for (int t = p; t + 1 < n; ++t) {
          if (ys[t + 1] <= half) {
            const double f = (ys[t] - half) / (ys[t] - ys[t + 1]);
            xr = xs[t] + f * (xs[t + 1] - xs[t]);
            break;
          }
          xr = xs[t + 1];
        }
        pk.width = xr - xl;
        peaks.push_back(pk);
      }
    }
    i = j + 1;
  }
  return peaks;
}

// Gaps between consecutive peak positions, e.g. the separation of a
// resonance split in two by the field.
inline std::vector<double> peak_separations(const std::vector<Peak>& peaks) {
  std::vector<double> gaps;
  for (std::size_t i = 1; i < peaks.size(); ++i)
    gaps.push_back(peaks[i].position - peaks[i - 1].position);
  return gaps;
}

}  // namespace cctunnel

#endif
