#include "eprbound/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <random>
#include <thread>

namespace eprbound {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0x9E3779B97F4A7C15ull * (index + 1));
  splitmix64(s);
  return splitmix64(s);
}

// Fixed Box-Muller transform over mt19937_64; independent of the standard
// library's std::normal_distribution so streams are stable.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

  double uniform01() {  // in (0, 1]
    return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

double reflect_into(double v, double lo, double hi) {
  // Coordinate-wise mirror; the span is finite so this terminates quickly
  // for any step obeying the stability guard.
  for (int k = 0; k < 128 && (v < lo || v > hi); ++k) {
    if (v < lo) v = 2.0 * lo - v;
    if (v > hi) v = 2.0 * hi - v;
  }
  return std::clamp(v, lo, hi);
}

// Deterministic per-path stepping shared by simulate and the estimators.
class PathRunner {
 public:
  PathRunner(const System& sys, const SimConfig& cfg) : sys_(sys), cfg_(cfg) {
    if (!(cfg.dt > 0.0)) throw ConfigError("sim dt must be positive");
    if (cfg.n_paths < 1) throw ConfigError("sim n_paths must be >= 1");
    if (cfg.thin < 1) throw ConfigError("sim thin must be >= 1");
    steps_ = static_cast<long>(std::llround(cfg.t_max / cfg.dt));
    if (steps_ < 1) throw ConfigError("sim t_max must cover at least one step");
    if (cfg.stationary_initial) {
      if (!cfg.initial_density)
        throw ConfigError("stationary initial condition needs a solved density");
      const ScalarField& rho = *cfg.initial_density;
      cdf_.resize(rho.v.size());
      double acc = 0.0;
      for (std::size_t k = 0; k < rho.v.size(); ++k) {
        acc += rho.v[k];
        cdf_[k] = acc;
      }
      for (double& c : cdf_) c /= acc;
    }
    // Stability guard on a coarse drift sample.
    Grid probe(sys.domain, 32, 32);
    CellVectorField f = sample_drift(sys, probe);
    double fmax = 0.0;
    for (int c = 0; c < probe.cells(); ++c)
      fmax = std::fmax(fmax, std::hypot(f.vx[static_cast<std::size_t>(c)],
                                        f.vy[static_cast<std::size_t>(c)]));
    double min_side = std::fmin(sys.domain.width(), sys.domain.height());
    if (cfg.dt * fmax > 0.1 * min_side)
      throw ConfigError("stability guard violated: dt * max|F| = " +
                        std::to_string(cfg.dt * fmax) + " exceeds 0.1 * min side " +
                        std::to_string(0.1 * min_side));
  }

  long steps() const { return steps_; }

  std::uint64_t path_seed(int index) const {
    return mix_seed(cfg_.master_seed, static_cast<std::uint64_t>(index));
  }

  // visit(x_old, x_new, step_index, reflected) for every step; start(x0) first.
  template <class Start, class Visit>
  void run(int path_index, Start&& start, Visit&& visit) const {
    NormalSampler rng(path_seed(path_index));
    const Domain& dom = sys_.domain;
    Vec2 x = cfg_.initial_point;
    if (cfg_.stationary_initial) {
      const Grid& g = cfg_.initial_density->grid;
      double u = rng.uniform01();
      std::size_t cell = static_cast<std::size_t>(
          std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
      if (cell >= cdf_.size()) cell = cdf_.size() - 1;
      int i = static_cast<int>(cell) % g.nx;
      int j = static_cast<int>(cell) / g.nx;
      x.x = g.x_node(i) + rng.uniform01() * g.hx;
      x.y = g.y_node(j) + rng.uniform01() * g.hy;
    }
    if (!dom.contains(x.x, x.y)) throw ConfigError("initial point outside the domain");
    start(x);

    const double sx = std::sqrt(2.0 * sys_.diffusion.d1 * cfg_.dt);
    const double sy = std::sqrt(2.0 * sys_.diffusion.d2 * cfg_.dt);
    for (long step = 0; step < steps_; ++step) {
      Vec2 f = sys_.drift(x.x, x.y);
      Vec2 raw{x.x + f.x * cfg_.dt + sx * rng.normal(),
               x.y + f.y * cfg_.dt + sy * rng.normal()};
      if (!std::isfinite(raw.x) || !std::isfinite(raw.y))
        throw NumericError("trajectory diverged to a non-finite state");
      Vec2 xn{reflect_into(raw.x, dom.x_min, dom.x_max),
              reflect_into(raw.y, dom.y_min, dom.y_max)};
      visit(x, xn, step, xn.x != raw.x || xn.y != raw.y);
      x = xn;
    }
  }

 private:
  const System& sys_;
  const SimConfig& cfg_;
  long steps_ = 0;
  std::vector<double> cdf_;
};

// Runs fn(path_index) over all paths on up to thread_budget() workers;
// results land in per-path slots so the merge order is fixed. The first
// worker exception is rethrown on the calling thread.
template <class Fn>
void for_each_path(int n_paths, Fn&& fn) {
  int workers = std::min(thread_budget(), n_paths);
  if (workers <= 1) {
    for (int p = 0; p < n_paths; ++p) fn(p);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int p = w; p < n_paths; p += workers) fn(p);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct MeanStderr {
  double mean, std_error;
};

MeanStderr mean_stderr(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  if (v.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  double var = ss / static_cast<double>(v.size() - 1);
  return {m, std::sqrt(var / static_cast<double>(v.size()))};
}

}  // namespace

int thread_budget() {
  if (const char* env = std::getenv("EPR_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

Ensemble simulate(const System& sys, const SimConfig& cfg) {
  PathRunner runner(sys, cfg);
  Ensemble ens;
  ens.sys = sys;
  ens.cfg = cfg;
  ens.steps_per_path = runner.steps();
  ens.paths.assign(static_cast<std::size_t>(cfg.n_paths), PathSummary{});

  for_each_path(cfg.n_paths, [&](int p) {
    PathSummary& out = ens.paths[static_cast<std::size_t>(p)];
    out.seed = runner.path_seed(p);
    out.n_steps = runner.steps();
    runner.run(
        p, [&](const Vec2& x0) { out.thinned.push_back(x0); },
        [&](const Vec2&, const Vec2& xn, long step, bool reflected) {
          out.sum_x += xn.x;
          out.sum_y += xn.y;
          out.sum_xx += xn.x * xn.x;
          out.sum_yy += xn.y * xn.y;
          if (reflected) ++out.n_reflections;
          if ((step + 1) % cfg.thin == 0) out.thinned.push_back(xn);
          out.final_state = xn;
        });
  });
  return ens;
}

EstimatorResult epr_estimator(const Ensemble& ens, const Decomposition& dec,
                              const DiffusionMatrix& d) {
  PathRunner runner(ens.sys, ens.cfg);
  const Grid& g = dec.f_irr.grid;
  const double t_total = static_cast<double>(runner.steps()) * ens.cfg.dt;

  std::vector<double> per_path(static_cast<std::size_t>(ens.cfg.n_paths), 0.0);
  std::vector<long> skipped(static_cast<std::size_t>(ens.cfg.n_paths), 0);
  for_each_path(ens.cfg.n_paths, [&](int p) {
    double acc = 0.0;
    long skip = 0;
    runner.run(
        p, [](const Vec2&) {},
        [&](const Vec2& x, const Vec2& xn, long, bool) {
          double mx = 0.5 * (x.x + xn.x), my = 0.5 * (x.y + xn.y);
          int ci = std::clamp(static_cast<int>((mx - g.domain.x_min) / g.hx), 0, g.nx - 1);
          int cj = std::clamp(static_cast<int>((my - g.domain.y_min) / g.hy), 0, g.ny - 1);
          if (!dec.valid[static_cast<std::size_t>(g.idx(ci, cj))]) {
            ++skip;
            return;
          }
          Vec2 w = bilinear(dec.f_irr, mx, my);
          acc += w.x * (xn.x - x.x) / d.d1 + w.y * (xn.y - x.y) / d.d2;
        });
    per_path[static_cast<std::size_t>(p)] = acc / t_total;
    skipped[static_cast<std::size_t>(p)] = skip;
  });

  MeanStderr ms = mean_stderr(per_path);
  EstimatorResult out{ms.mean, ms.std_error, ens.cfg.n_paths, 0};
  for (long s : skipped) out.skipped += s;
  return out;
}

EstimatorResult tur_lower_bound(const Ensemble& ens, const CellVectorField& weight,
                                double t_window) {
  PathRunner runner(ens.sys, ens.cfg);
  long steps_per_window = static_cast<long>(std::llround(t_window / ens.cfg.dt));
  if (steps_per_window < 1) throw ConfigError("t_window must cover at least one step");
  long windows_per_path = runner.steps() / steps_per_window;
  if (windows_per_path < 1) throw ConfigError("t_window exceeds the path length");

  std::vector<std::vector<double>> per_path(static_cast<std::size_t>(ens.cfg.n_paths));
  for_each_path(ens.cfg.n_paths, [&](int p) {
    std::vector<double>& windows = per_path[static_cast<std::size_t>(p)];
    windows.reserve(static_cast<std::size_t>(windows_per_path));
    double acc = 0.0;
    runner.run(
        p, [](const Vec2&) {},
        [&](const Vec2& x, const Vec2& xn, long step, bool) {
          Vec2 w = bilinear(weight, 0.5 * (x.x + xn.x), 0.5 * (x.y + xn.y));
          acc += w.x * (xn.x - x.x) + w.y * (xn.y - x.y);
          if ((step + 1) % steps_per_window == 0 &&
              static_cast<long>(windows.size()) < windows_per_path) {
            windows.push_back(acc);
            acc = 0.0;
          }
        });
  });

  std::vector<double> j;  // pooled in path order
  for (const auto& w : per_path) j.insert(j.end(), w.begin(), w.end());
  const long n = static_cast<long>(j.size());
  if (n < 50) throw ConfigError("TUR needs >= 50 windows; got " + std::to_string(n));

  double sum = 0.0, sum_sq = 0.0;
  for (double x : j) {
    sum += x;
    sum_sq += x * x;
  }
  double mean = sum / static_cast<double>(n);
  double var = (sum_sq - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
  if (!(var > 0.0)) throw NumericError("zero-variance current; TUR bound undefined");
  double t_w = static_cast<double>(steps_per_window) * ens.cfg.dt;
  auto bound = [&](double m, double v) { return 2.0 * m * m / (t_w * v); };

  // Jackknife over windows.
  double theta = bound(mean, var);
  std::vector<double> reps(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    double xi = j[static_cast<std::size_t>(i)];
    double m_i = (sum - xi) / static_cast<double>(n - 1);
    double ss_i = sum_sq - xi * xi;
    double var_i =
        (ss_i - static_cast<double>(n - 1) * m_i * m_i) / static_cast<double>(n - 2);
    reps[static_cast<std::size_t>(i)] = var_i > 0.0 ? bound(m_i, var_i) : theta;
  }
  double rep_mean = 0.0;
  for (double r : reps) rep_mean += r;
  rep_mean /= static_cast<double>(n);
  double jk = 0.0;
  for (double r : reps) jk += (r - rep_mean) * (r - rep_mean);
  double std_error = std::sqrt(jk * static_cast<double>(n - 1) / static_cast<double>(n));

  return {theta, std_error, n, 0};
}

ScalarField binned_density(const Ensemble& ens, int nx, int ny) {
  Grid g(ens.sys.domain, nx, ny);
  ScalarField d(g);
  long total = 0;
  for (const auto& p : ens.paths)
    for (const Vec2& s : p.thinned) {
      int i = std::clamp(static_cast<int>((s.x - g.domain.x_min) / g.hx), 0, nx - 1);
      int j = std::clamp(static_cast<int>((s.y - g.domain.y_min) / g.hy), 0, ny - 1);
      d.at(i, j) += 1.0;
      ++total;
    }
  if (total == 0) throw NumericError("ensemble holds no thinned states");
  for (double& v : d.v) v /= static_cast<double>(total) * g.cell_area();
  return d;
}

}  // namespace eprbound
