#include "bpire/conditioned.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "bpire/errors.hpp"
#include "bpire/io.hpp"
#include "bpire/logsumexp.hpp"

namespace bpire {

namespace {

// Grid in |x|, ascending, deduplicated, with 0 prepended.
std::vector<double> normalize_grid(std::vector<double> grid, RenewalTable::Kind kind) {
  if (grid.empty()) throw DomainError("renewal estimate: empty grid");
  for (double& x : grid) {
    if (!std::isfinite(x)) throw DomainError("renewal estimate: grid points must be finite");
    if (kind == RenewalTable::Kind::U && x < 0.0) {
      throw DomainError("estimate_U: grid points must be >= 0");
    }
    if (kind == RenewalTable::Kind::V && x > 0.0) {
      throw DomainError("estimate_V: grid points must be <= 0");
    }
    x = std::fabs(x);
  }
  grid.push_back(0.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

struct VisitCounts {
  std::vector<std::uint64_t> sum;
  std::vector<double> sumsq;
  std::uint64_t paths = 0;
  std::uint64_t truncated = 0;
  void merge(const VisitCounts& o) {
    if (sum.empty()) {
      *this = o;
      return;
    }
    for (std::size_t k = 0; k < sum.size(); ++k) {
      sum[k] += o.sum[k];
      sumsq[k] += o.sumsq[k];
    }
    paths += o.paths;
    truncated += o.truncated;
  }
};

RenewalTable estimate_renewal(const IncrementLaw& law, std::vector<double> x_grid,
                              std::uint64_t paths, std::uint64_t cap, StreamKey key,
                              unsigned workers, RenewalTable::Kind kind) {
  if (cap == 0) throw DomainError("renewal estimate: cap must be >= 1");
  if (paths == 0) throw DomainError("renewal estimate: paths must be >= 1");
  const std::vector<double> ygrid = normalize_grid(std::move(x_grid), kind);
  const std::size_t g = ygrid.size();
  const bool is_u = kind == RenewalTable::Kind::U;

  const std::uint64_t nb = (paths + kBatchSize - 1) / kBatchSize;
  auto parts = run_batches<VisitCounts>(0, nb, workers, [&](std::uint64_t b) {
    RngStream rng(key.child(b));
    VisitCounts c;
    c.sum.assign(g, 0);
    c.sumsq.assign(g, 0.0);
    std::vector<std::uint64_t> diff(g + 1);
    const std::uint64_t k = batch_samples(b, paths);
    for (std::uint64_t p = 0; p < k; ++p) {
      std::fill(diff.begin(), diff.end(), 0);
      double s = 0.0;
      bool stopped = false;
      for (std::uint64_t step = 1; step <= cap; ++step) {
        s += law.sample(rng);
        if (is_u ? s >= 0.0 : s < 0.0) {
          stopped = true;
          break;
        }
        // U: count grid points y >= -s; V: count grid points y > s.
        const auto it = is_u ? std::lower_bound(ygrid.begin(), ygrid.end(), -s)
                             : std::upper_bound(ygrid.begin(), ygrid.end(), s);
        ++diff[static_cast<std::size_t>(it - ygrid.begin())];
      }
      std::uint64_t running = 0;
      for (std::size_t j = 0; j < g; ++j) {
        running += diff[j];
        c.sum[j] += running;
        c.sumsq[j] += static_cast<double>(running) * static_cast<double>(running);
      }
      ++c.paths;
      if (!stopped) ++c.truncated;
    }
    return c;
  });
  const VisitCounts total = tree_reduce<VisitCounts>(parts);

  RenewalTable table;
  table.kind = kind;
  table.cap = cap;
  table.paths = total.paths;
  table.seed = key.master_seed();
  table.truncated_fraction =
      static_cast<double>(total.truncated) / static_cast<double>(total.paths);
  const double np = static_cast<double>(total.paths);
  for (std::size_t j = 0; j < g; ++j) {
    table.grid.push_back(is_u ? ygrid[j] : -ygrid[j]);
    const double mean = static_cast<double>(total.sum[j]) / np;
    table.values.push_back(1.0 + mean);
    const double var = np > 1 ? std::max(0.0, (total.sumsq[j] - np * mean * mean) / (np - 1)) : 0.0;
    table.stderr_values.push_back(std::sqrt(var / np));
  }
  return table;
}

double interpolate(const std::vector<double>& grid, const std::vector<double>& values, double y) {
  // grid here is |x| ascending
  const std::size_t g = grid.size();
  if (g == 1) return values[0];
  if (y <= grid[0]) return values[0];
  if (y >= grid[g - 1]) {
    const double slope = (values[g - 1] - values[g - 2]) / (grid[g - 1] - grid[g - 2]);
    return values[g - 1] + slope * (y - grid[g - 1]);
  }
  const auto it = std::upper_bound(grid.begin(), grid.end(), y);
  const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
  const std::size_t lo = hi - 1;
  const double t = (y - grid[lo]) / (grid[hi] - grid[lo]);
  return values[lo] + t * (values[hi] - values[lo]);
}

std::vector<double> abs_grid(const RenewalTable& t) {
  std::vector<double> y(t.grid.size());
  std::transform(t.grid.begin(), t.grid.end(), y.begin(), [](double x) { return std::fabs(x); });
  return y;
}

double table_abs_arg(const RenewalTable& t, double x) {
  if (t.kind == RenewalTable::Kind::U && x < 0.0) {
    throw DomainError("U table evaluated at x < 0");
  }
  if (t.kind == RenewalTable::Kind::V && x > 0.0) {
    throw DomainError("V table evaluated at x > 0");
  }
  if (t.grid.empty()) throw DomainError("empty renewal table");
  return std::fabs(x);
}

}  // namespace

RenewalTable RenewalTable::constant(Kind kind, std::vector<double> grid, double value) {
  RenewalTable t;
  t.kind = kind;
  const auto y = normalize_grid(std::move(grid), kind);
  for (double v : y) {
    t.grid.push_back(kind == Kind::U ? v : -v);
    t.values.push_back(value);
    t.stderr_values.push_back(0.0);
  }
  return t;
}

double RenewalTable::operator()(double x) const {
  const double y = table_abs_arg(*this, x);
  return interpolate(abs_grid(*this), values, y);
}

double RenewalTable::stderr_at(double x) const {
  const double y = table_abs_arg(*this, x);
  return interpolate(abs_grid(*this), stderr_values, y);
}

RenewalTable estimate_U(const IncrementLaw& law, std::vector<double> x_grid, std::uint64_t paths,
                        std::uint64_t cap, StreamKey key, unsigned workers) {
  return estimate_renewal(law, std::move(x_grid), paths, cap, key, workers, RenewalTable::Kind::U);
}

RenewalTable estimate_V(const IncrementLaw& law, std::vector<double> x_grid, std::uint64_t paths,
                        std::uint64_t cap, StreamKey key, unsigned workers) {
  return estimate_renewal(law, std::move(x_grid), paths, cap, key, workers, RenewalTable::Kind::V);
}

HarmonicityResidual harmonicity_residual(const IncrementLaw& law, const RenewalTable& table,
                                         double x, std::uint64_t reps, StreamKey key,
                                         unsigned workers) {
  if (reps == 0) throw DomainError("harmonicity_residual: reps must be >= 1");
  const bool is_u = table.kind == RenewalTable::Kind::U;
  if (is_u ? !(x >= 0.0) : !(x <= 0.0)) {
    throw DomainError(is_u ? "harmonicity_residual: U requires x >= 0"
                           : "harmonicity_residual: V requires x <= 0");
  }
  const std::vector<double> y = abs_grid(table);
  const SampleKernel kernel = [&](RngStream& rng, WalkPath&) {
    const double z = x + law.sample(rng);
    if (is_u) return z >= 0.0 ? interpolate(y, table.values, z) : 0.0;
    return z < 0.0 ? interpolate(y, table.values, -z) : 0.0;
  };
  const EstimatorResult r = estimate_mean(key, SamplingTarget::fixed(reps), workers, kernel);
  HarmonicityResidual out;
  out.residual = r.mean - table(x);
  out.se = r.std_error;
  out.table_se = table.stderr_at(x);
  return out;
}

PathFunctional PathFunctional::custom(std::function<double(std::span<const double>)> fn) {
  PathFunctional f(Kind::custom);
  f.fn_ = std::move(fn);
  return f;
}

PathFunctional PathFunctional::from_tag(std::string_view tag) {
  if (tag == "one") return one();
  if (tag == "exp_neg_final") return exp_neg_final();
  if (tag == "inv_one_plus_exp_sum") return inv_one_plus_exp_sum();
  throw DomainError("unknown path functional tag '" + std::string(tag) + "'");
}

double PathFunctional::operator()(std::span<const double> sums) const {
  switch (kind_) {
    case Kind::one: return 1.0;
    case Kind::exp_neg_final: return std::exp(-sums.back());
    case Kind::inv_one_plus_exp_sum: {
      LogSumExp acc;
      acc.add(0.0);
      for (double s : sums) acc.add(-s);
      return std::exp(-acc.value());
    }
    case Kind::custom: return fn_(sums);
  }
  return 0.0;
}

WeightedEstimate plus_measure_expectation(const IncrementLaw& law, const PathFunctional& functional,
                                          std::size_t n, double x, std::uint64_t reps,
                                          const RenewalTable& table_U, StreamKey key,
                                          unsigned workers) {
  if (table_U.kind != RenewalTable::Kind::U) {
    throw DomainError("plus_measure_expectation: needs a U table");
  }
  if (!(x >= 0.0)) throw DomainError("plus_measure_expectation: x must be >= 0");
  if (reps == 0) throw DomainError("plus_measure_expectation: reps must be >= 1");
  const double u_x = table_U(x);
  const std::vector<double> y = abs_grid(table_U);
  const SampleKernel kernel = [&](RngStream& rng, WalkPath& scratch) {
    thread_local std::vector<double> shifted;
    shifted.resize(n + 1);
    shifted[0] = x;
    double s = x;
    bool kept = true;
    for (std::size_t k = 1; k <= n; ++k) {
      s += law.sample(rng);
      shifted[k] = s;
      if (s < 0.0) kept = false;
    }
    (void)scratch;
    if (!kept) return 0.0;
    return functional(shifted) * interpolate(y, table_U.values, s) / u_x;
  };
  const EstimatorResult r = estimate_mean(key, SamplingTarget::fixed(reps), workers, kernel);
  return {r.mean, r.std_error, r.nsamples};
}

bool WalkCondition::holds(std::span<const double> sums) const {
  const std::size_t n = sums.size() - 1;
  switch (kind) {
    case Kind::min_at_least:
      return *std::min_element(sums.begin(), sums.end()) >= -x;
    case Kind::max_below:
      return n >= 1 && *std::max_element(sums.begin() + 1, sums.end()) < -x;
    case Kind::tau_equals:
      return first_argmin(sums, n) == r;
  }
  return false;
}

namespace {

struct ConditionalCount {
  Moments accepted;
  std::uint64_t reps = 0;
  void merge(const ConditionalCount& o) noexcept {
    accepted.merge(o.accepted);
    reps += o.reps;
  }
};

}  // namespace

ConditionalEstimate conditional_expectation(const IncrementLaw& law,
                                            const PathFunctional& functional,
                                            const WalkCondition& condition, std::size_t n,
                                            std::uint64_t reps, StreamKey key, unsigned workers) {
  if (n == 0) throw DomainError("conditional_expectation: n must be >= 1");
  if (reps == 0) throw DomainError("conditional_expectation: reps must be >= 1");
  if (condition.kind == WalkCondition::Kind::tau_equals) {
    if (law.is_lattice()) {
      throw DomainError("conditional_expectation: {tau(n) = r} needs a continuous law");
    }
    if (condition.r > n) throw DomainError("conditional_expectation: r must lie in [0, n]");
  } else if (!(condition.x >= 0.0)) {
    throw DomainError("conditional_expectation: x must be >= 0");
  }
  const std::uint64_t nb = (reps + kBatchSize - 1) / kBatchSize;
  auto parts = run_batches<ConditionalCount>(0, nb, workers, [&](std::uint64_t b) {
    RngStream rng(key.child(b));
    WalkPath path;
    ConditionalCount c;
    const std::uint64_t k = batch_samples(b, reps);
    for (std::uint64_t r = 0; r < k; ++r) {
      path.resample(law, n, rng);
      ++c.reps;
      if (condition.holds(path.partial_sums())) c.accepted.add(functional(path.partial_sums()));
    }
    return c;
  });
  const ConditionalCount total = tree_reduce<ConditionalCount>(parts);
  if (total.accepted.count == 0) {
    throw NoSampleError("conditional_expectation: no path satisfied the condition in " +
                        std::to_string(total.reps) + " draws");
  }
  ConditionalEstimate out;
  out.estimate = total.accepted.mean;
  out.se = total.accepted.std_error();
  out.accepted = total.accepted.count;
  out.reps = total.reps;
  out.acceptance_rate = static_cast<double>(out.accepted) / static_cast<double>(out.reps);
  return out;
}

double tilted_integral(const RenewalTable& table, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("tilted_integral: lambda must be > 0");
  if (table.grid.empty()) throw DomainError("tilted_integral: empty table");
  const std::vector<double> y = abs_grid(table);
  const auto& v = table.values;
  const std::size_t g = y.size();
  const double l2 = lambda * lambda;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < g; ++k) {
    const double a = y[k];
    const double b = y[k + 1];
    const double ea = std::exp(-lambda * a);
    const double eb = std::exp(-lambda * b);
    const double slope = (v[k + 1] - v[k]) / (b - a);
    const double flat = (ea - eb) / lambda;
    const double ramp = -(b - a) * eb / lambda - eb / l2 + ea / l2;
    total += v[k] * flat + slope * ramp;
  }
  const double last = y[g - 1];
  const double slope = g >= 2 ? (v[g - 1] - v[g - 2]) / (y[g - 1] - y[g - 2]) : 0.0;
  total += std::exp(-lambda * last) * (v[g - 1] / lambda + slope / l2);
  return total;
}

TiltedMeasureSpec mu_nu_normalizers(const RenewalTable& table_U, const RenewalTable& table_V,
                                    double lambda) {
  if (!(lambda > 0.0)) throw DomainError("mu_nu_normalizers: lambda must be > 0");
  if (table_U.kind != RenewalTable::Kind::U || table_V.kind != RenewalTable::Kind::V) {
    throw DomainError("mu_nu_normalizers: expects a U table and a V table");
  }
  return {lambda, 1.0 / tilted_integral(table_U, lambda), 1.0 / tilted_integral(table_V, lambda)};
}

std::string renewal_csv(const RenewalTable& table) {
  std::ostringstream out;
  out << "# kind=" << (table.kind == RenewalTable::Kind::U ? "U" : "V") << '\n';
  out << "# cap=" << table.cap << ",paths=" << table.paths << ",seed=" << table.seed
      << ",truncated_fraction=" << format_double(table.truncated_fraction) << '\n';
  out << "x,value,stderr\n";
  for (std::size_t k = 0; k < table.grid.size(); ++k) {
    out << format_double(table.grid[k]) << ',' << format_double(table.values[k]) << ','
        << format_double(table.stderr_values[k]) << '\n';
  }
  return out.str();
}

void write_renewal_csv(const RenewalTable& table, const std::filesystem::path& file) {
  write_file_atomic(file, renewal_csv(table));
}

RenewalTable read_renewal_csv(const std::filesystem::path& file) {
  std::istringstream in(read_file(file));
  RenewalTable t;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream fields(line.substr(1));
      std::string item;
      while (std::getline(fields, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) continue;
        std::string k = item.substr(0, eq);
        k.erase(0, k.find_first_not_of(' '));
        const std::string v = item.substr(eq + 1);
        if (k == "kind") t.kind = v == "V" ? RenewalTable::Kind::V : RenewalTable::Kind::U;
        else if (k == "cap") t.cap = std::stoull(v);
        else if (k == "paths") t.paths = std::stoull(v);
        else if (k == "seed") t.seed = std::stoull(v);
        else if (k == "truncated_fraction") t.truncated_fraction = std::stod(v);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "x,value,stderr") throw std::runtime_error(file.string() + ": bad renewal header");
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string a, b, c;
    std::getline(row, a, ',');
    std::getline(row, b, ',');
    std::getline(row, c, ',');
    t.grid.push_back(std::stod(a));
    t.values.push_back(std::stod(b));
    t.stderr_values.push_back(std::stod(c));
  }
  if (t.grid.empty()) throw std::runtime_error(file.string() + ": renewal table has no rows");
  return t;
}

}  // namespace bpire
