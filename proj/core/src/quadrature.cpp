#include "lavgap/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "lavgap/cantor.hpp"
#include "lavgap/forms.hpp"
#include "lavgap/sampling.hpp"

namespace lavgap {

const std::vector<std::pair<double, double>>& gaussRule(int order) {
  if (order < 1 || order > 64) throw std::invalid_argument("gaussRule: order out of [1,64]");
  static std::map<int, std::vector<std::pair<double, double>>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  std::vector<std::pair<double, double>> rule(order);
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule[i] = {-x, w};
    rule[n - 1 - i] = {x, w};
  }
  auto [pos, inserted] = cache.emplace(order, std::move(rule));
  return pos->second;
}

int workerThreads() {
  if (const char* env = std::getenv("LAVGAP_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

namespace {

double pairwiseReduce(std::vector<double>& v) {
  std::size_t n = v.size();
  while (n > 1) {
    std::size_t h = 0;
    for (std::size_t i = 0; i + 1 < n; i += 2) v[h++] = v[i] + v[i + 1];
    if (n % 2 == 1) v[h++] = v[n - 1];
    n = h;
  }
  return n ? v[0] : 0.0;
}

constexpr std::size_t kChunk = 2048;

void parallelChunks(std::size_t count,
                    const std::function<void(std::size_t, std::size_t)>& run,
                    int threads) {
  if (threads <= 0) threads = workerThreads();
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  if (threads == 1 || chunks <= 1) {
    for (std::size_t c = 0; c < chunks; ++c)
      run(c * kChunk, std::min(count, (c + 1) * kChunk));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr firstError;
  std::mutex errMtx;
  auto worker = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        run(c * kChunk, std::min(count, (c + 1) * kChunk));
      } catch (...) {
        std::lock_guard<std::mutex> lock(errMtx);
        if (!firstError) firstError = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int nThreads = std::min<std::size_t>(threads, chunks);
  pool.reserve(nThreads);
  for (int t = 0; t < nThreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (firstError) std::rethrow_exception(firstError);
}

}  // namespace

double deterministicSum(std::size_t count, const std::function<double(std::size_t)>& term,
                        int threads) {
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<double> chunkSums(chunks, 0.0);
  parallelChunks(
      count,
      [&](std::size_t begin, std::size_t end) {
        std::vector<double> buf;
        buf.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) buf.push_back(term(i));
        chunkSums[begin / kChunk] = pairwiseReduce(buf);
      },
      threads);
  return pairwiseReduce(chunkSums);
}

std::size_t reductionChunkSize() { return kChunk; }

void parallelForChunks(std::size_t count,
                       const std::function<void(std::size_t, std::size_t)>& run,
                       int threads) {
  parallelChunks(count, run, threads);
}

double pairwiseSum(std::vector<double>& values) { return pairwiseReduce(values); }

std::string toString(ConvergenceVerdict v) {
  switch (v) {
    case ConvergenceVerdict::Convergent: return "convergent";
    case ConvergenceVerdict::Divergent: return "divergent";
    case ConvergenceVerdict::Inconclusive: return "inconclusive";
    case ConvergenceVerdict::NotApplicable: return "n/a";
  }
  return "?";
}

bool PowerLogIntegrand::symbolicConvergent() const {
  if (e > 1e-14) return true;
  if (e < -1e-14) return false;
  return r < -1.0;
}

namespace {

double logPanel(const std::function<double(double)>& f, double lo, double hi, int order) {
  // Substitute t = exp(u): integrand f(e^u) e^u over [ln lo, ln hi].
  const double ulo = std::log(lo);
  const double uhi = std::log(hi);
  const double half = 0.5 * (uhi - ulo);
  const double mid = 0.5 * (uhi + ulo);
  double s = 0.0;
  for (const auto& [xi, wi] : gaussRule(order)) {
    const double u = mid + half * xi;
    const double t = std::exp(u);
    const double v = f(t) * t;
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "integrateReduced: non-finite integrand at t=" << t;
      throw std::runtime_error(os.str());
    }
    s += wi * v;
  }
  return s * half;
}

}  // namespace

namespace {

struct DyadicFit {
  double e = 1.0;
  double r = 0.0;
  bool ok = false;
};

DyadicFit fitIncrements(const std::function<double(double)>& eval, double tMax,
                        int levels, int order, int stride, std::uint64_t* nodes) {
  std::vector<double> inc(levels, 0.0);
  for (int j = 0; j < levels; ++j) {
    const double hi = tMax * std::exp2(-static_cast<double>(j));
    const double lo = tMax * std::exp2(-static_cast<double>(j + 1));
    inc[j] = logPanel(eval, lo, hi, order);
    if (nodes) *nodes += order;
  }
  // Aggregate over one lacunarity period so the bounded oscillation of the
  // measured set quantities cancels, then fit
  // ln D_g = a + b j_g + c ln(j_g) on the deep part.
  stride = std::max(1, stride);
  double S[3][3] = {};
  double rhs[3] = {};
  int used = 0;
  const int first = std::max(stride, ((std::max(4, levels / 4) + stride - 1) / stride) * stride);
  for (int g = first; g + stride <= levels; g += stride) {
    double block = 0.0;
    for (int j = g; j < g + stride; ++j) block += inc[j];
    if (!(block > 0.0)) continue;
    const double jg = g + 0.5 * (stride - 1);
    const double reg[3] = {1.0, jg, std::log(jg + 1.0)};
    const double y = std::log(block);
    for (int ai = 0; ai < 3; ++ai) {
      rhs[ai] += reg[ai] * y;
      for (int bi = 0; bi < 3; ++bi) S[ai][bi] += reg[ai] * reg[bi];
    }
    ++used;
  }
  DyadicFit fit;
  if (used < std::max(3, 8 / stride)) return fit;  // vanished at depth: convergent tail
  double M[3][4];
  for (int i = 0; i < 3; ++i) {
    for (int j2 = 0; j2 < 3; ++j2) M[i][j2] = S[i][j2];
    M[i][3] = rhs[i];
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int rw = col + 1; rw < 3; ++rw)
      if (std::abs(M[rw][col]) > std::abs(M[piv][col])) piv = rw;
    std::swap(M[col], M[piv]);
    if (std::abs(M[col][col]) > 1e-300) {
      for (int rw = col + 1; rw < 3; ++rw) {
        const double fpiv = M[rw][col] / M[col][col];
        for (int c2 = col; c2 < 4; ++c2) M[rw][c2] -= fpiv * M[col][c2];
      }
    }
  }
  double sol[3] = {};
  for (int rw = 2; rw >= 0; --rw) {
    double v = M[rw][3];
    for (int c2 = rw + 1; c2 < 3; ++c2) v -= M[rw][c2] * sol[c2];
    sol[rw] = std::abs(M[rw][rw]) > 1e-300 ? v / M[rw][rw] : 0.0;
  }
  fit.e = -sol[1] / std::numbers::ln2;
  fit.r = sol[2];
  fit.ok = true;
  return fit;
}

}  // namespace

QuadResult integrateReduced(const PowerLogIntegrand& f, const ReducedQuadConfig& cfg) {
  if (!(cfg.tMin > 0.0 && cfg.tMin < f.tMax))
    throw std::invalid_argument("integrateReduced: need 0 < tMin < tMax");
  if (!f.eval) throw std::invalid_argument("integrateReduced: missing evaluator");

  QuadResult out;
  const int J = cfg.dyadicLevels;

  const DyadicFit fit =
      fitIncrements(f.eval, f.tMax, J, cfg.gaussOrder, f.fitStride, &out.nodes);
  out.fittedExponent = fit.e;
  out.fittedLogExponent = fit.r;

  // Reference class: the model counterpart's fit when provided (absorbs
  // finite-window log drift), else the bare symbolic pair.
  double eRef = f.e;
  double rRef = f.r;
  if (f.modelEval) {
    const DyadicFit ref =
        fitIncrements(f.modelEval, f.tMax, J, cfg.gaussOrder, f.fitStride, &out.nodes);
    if (ref.ok || !fit.ok) {
      eRef = ref.e;
      rRef = ref.r;
    }
  }
  const bool consistent = std::abs(fit.e - eRef) <= cfg.exponentTolerance &&
                          std::abs(fit.r - rRef) <= cfg.logTolerance;
  const bool symConv = f.symbolicConvergent();
  const ConvergenceVerdict symbolic =
      symConv ? ConvergenceVerdict::Convergent : ConvergenceVerdict::Divergent;
  out.verdict = consistent ? symbolic : ConvergenceVerdict::Inconclusive;

  // Value over [tMin, tMax]: dyadic panels above tMin plus the clipped stub.
  double value = 0.0;
  double err = 0.0;
  double hiEdge = f.tMax;
  for (int j = 0;; ++j) {
    double loEdge = f.tMax * std::exp2(-static_cast<double>(j + 1));
    const bool last = loEdge <= cfg.tMin;
    if (last) loEdge = cfg.tMin;
    const double a = logPanel(f.eval, loEdge, hiEdge, cfg.gaussOrder);
    const double b = logPanel(f.eval, loEdge, hiEdge, cfg.gaussOrder + 4);
    value += b;
    err += std::abs(b - a);
    out.nodes += 2 * cfg.gaussOrder + 4;
    hiEdge = loEdge;
    if (last) break;
  }
  out.value = value;
  out.errorEstimate = err;
  return out;
}

Partition1D Partition1D::uniform(double lo, double hi, int panels) {
  if (!(hi > lo) || panels < 1) throw std::invalid_argument("Partition1D::uniform: bad range");
  Partition1D p;
  p.edges.resize(panels + 1);
  for (int i = 0; i <= panels; ++i)
    p.edges[i] = lo + (hi - lo) * static_cast<double>(i) / panels;
  return p;
}

Partition1D Partition1D::dyadicTowardZero(double a, int levels) {
  if (!(a > 0.0) || levels < 1)
    throw std::invalid_argument("Partition1D::dyadicTowardZero: bad parameters");
  Partition1D p;
  p.edges.push_back(0.0);
  for (int j = levels; j >= 0; --j) p.edges.push_back(a * std::exp2(-static_cast<double>(j)));
  std::vector<double> neg;
  for (double e : p.edges)
    if (e > 0.0) neg.push_back(-e);
  p.edges.insert(p.edges.end(), neg.begin(), neg.end());
  std::sort(p.edges.begin(), p.edges.end());
  return p;
}

Partition1D Partition1D::cantorGraded(const CantorSet& set, int depth, double lo,
                                      double hi, int outerPanels) {
  if (set.isPoint())
    throw std::invalid_argument("cantorGraded: use dyadicTowardZero for point sets");
  std::vector<double> edges;
  IntervalGeneration g = set.generation(std::min(depth, set.maxDepth()));
  for (const Interval& iv : g.intervals) {
    edges.push_back(iv.a);
    edges.push_back(iv.b);
  }
  for (int i = 0; i <= outerPanels; ++i) {
    edges.push_back(lo + (-0.5 - lo) * static_cast<double>(i) / outerPanels);
    edges.push_back(0.5 + (hi - 0.5) * static_cast<double>(i) / outerPanels);
  }
  std::sort(edges.begin(), edges.end());
  Partition1D p;
  for (double e : edges) {
    if (e < lo - 1e-15 || e > hi + 1e-15) continue;
    if (p.edges.empty() || e - p.edges.back() > 1e-13) p.edges.push_back(e);
  }
  if (p.edges.size() < 2) throw std::invalid_argument("cantorGraded: degenerate partition");
  return p;
}

namespace {

struct BoxMesh {
  int dim = 0;
  std::vector<const Partition1D*> axes;
  std::vector<std::size_t> counts;
  std::size_t panels = 1;

  explicit BoxMesh(const BoxQuadConfig& cfg) {
    dim = static_cast<int>(cfg.axes.size());
    if (dim < 1 || dim > 6) throw std::invalid_argument("integrateBox: need 1..6 axes");
    for (const auto& a : cfg.axes) {
      axes.push_back(&a);
      counts.push_back(a.panelCount());
      panels *= counts.back();
    }
  }

  void panelBounds(std::size_t p, double* lo, double* hi) const {
    for (int i = 0; i < dim; ++i) {
      const std::size_t idx = p % counts[i];
      p /= counts[i];
      lo[i] = axes[i]->edges[idx];
      hi[i] = axes[i]->edges[idx + 1];
    }
  }
};

double panelGauss(const PointFunction& f, const double* lo, const double* hi, int dim,
                  int order, double jitterAmp, std::uint64_t jitterKey) {
  const auto& rule = gaussRule(order);
  std::size_t nodes = 1;
  for (int i = 0; i < dim; ++i) nodes *= order;
  double sum = 0.0;
  std::vector<double> x(dim);
  for (std::size_t nd = 0; nd < nodes; ++nd) {
    double w = 1.0;
    std::size_t rest = nd;
    for (int i = 0; i < dim; ++i) {
      const std::size_t q = rest % order;
      rest /= order;
      const double half = 0.5 * (hi[i] - lo[i]);
      const double mid = 0.5 * (hi[i] + lo[i]);
      double xi = mid + half * rule[q].first;
      if (jitterAmp > 0.0) {
        Rng rng(jitterKey * 0x9e3779b97f4a7c15ull + nd * 131 + i);
        const double off = jitterAmp * (hi[i] - lo[i]) * (rng.uniform() - 0.5);
        xi = std::clamp(xi + off, lo[i], hi[i]);
      }
      x[i] = xi;
      w *= half * rule[q].second;
    }
    const double v = f(x);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "integrateBox: non-finite integrand at (";
      for (int i = 0; i < dim; ++i) os << (i ? "," : "") << x[i];
      os << ")";
      throw std::runtime_error(os.str());
    }
    sum += w * v;
  }
  return sum;
}

}  // namespace

QuadResult integrateBox(const PointFunction& f, const BoxQuadConfig& cfg) {
  BoxMesh mesh(cfg);
  std::vector<double> vHi(mesh.panels), vDiff(mesh.panels);
  parallelChunks(
      mesh.panels,
      [&](std::size_t begin, std::size_t end) {
        double lo[6], hi[6];
        for (std::size_t p = begin; p < end; ++p) {
          mesh.panelBounds(p, lo, hi);
          const double a =
              panelGauss(f, lo, hi, mesh.dim, cfg.gaussOrder, cfg.nodeJitter, cfg.seed + p);
          const double b = panelGauss(f, lo, hi, mesh.dim, cfg.gaussOrderHi, cfg.nodeJitter,
                                      cfg.seed + p);
          vHi[p] = b;
          vDiff[p] = std::abs(b - a);
        }
      },
      cfg.threads);
  QuadResult out;
  out.value = pairwiseReduce(vHi);
  out.errorEstimate = pairwiseReduce(vDiff);
  std::uint64_t perPanel = 1;
  for (int i = 0; i < mesh.dim; ++i) perPanel *= cfg.gaussOrder;
  std::uint64_t perPanelHi = 1;
  for (int i = 0; i < mesh.dim; ++i) perPanelHi *= cfg.gaussOrderHi;
  out.nodes = mesh.panels * (perPanel + perPanelHi);
  return out;
}

std::string panelDiagnosticsCsv(const PointFunction& f, const BoxQuadConfig& cfg) {
  BoxMesh mesh(cfg);
  std::ostringstream os;
  os << "# lavgap-panels/1\npanel";
  for (int i = 0; i < mesh.dim; ++i) os << ",lo" << (i + 1) << ",hi" << (i + 1);
  os << ",value,error\n";
  double lo[6], hi[6];
  for (std::size_t p = 0; p < mesh.panels; ++p) {
    mesh.panelBounds(p, lo, hi);
    const double a = panelGauss(f, lo, hi, mesh.dim, cfg.gaussOrder, cfg.nodeJitter,
                                cfg.seed + p);
    const double b = panelGauss(f, lo, hi, mesh.dim, cfg.gaussOrderHi, cfg.nodeJitter,
                                cfg.seed + p);
    os << p;
    for (int i = 0; i < mesh.dim; ++i) os << ',' << lo[i] << ',' << hi[i];
    os << ',' << b << ',' << std::abs(b - a) << "\n";
  }
  return os.str();
}

NodeTable buildNodeTable(const BoxQuadConfig& cfg) {
  BoxMesh mesh(cfg);
  const auto& rule = gaussRule(cfg.gaussOrder);
  std::size_t nodesPerPanel = 1;
  for (int i = 0; i < mesh.dim; ++i) nodesPerPanel *= cfg.gaussOrder;
  NodeTable table;
  table.dim = mesh.dim;
  table.coords.resize(mesh.panels * nodesPerPanel * mesh.dim);
  table.weights.resize(mesh.panels * nodesPerPanel);
  parallelChunks(
      mesh.panels,
      [&](std::size_t begin, std::size_t end) {
        double lo[6], hi[6];
        for (std::size_t p = begin; p < end; ++p) {
          mesh.panelBounds(p, lo, hi);
          for (std::size_t nd = 0; nd < nodesPerPanel; ++nd) {
            double w = 1.0;
            std::size_t rest = nd;
            const std::size_t base = p * nodesPerPanel + nd;
            for (int i = 0; i < mesh.dim; ++i) {
              const std::size_t q = rest % cfg.gaussOrder;
              rest /= cfg.gaussOrder;
              const double half = 0.5 * (hi[i] - lo[i]);
              const double mid = 0.5 * (hi[i] + lo[i]);
              double xi = mid + half * rule[q].first;
              if (cfg.nodeJitter > 0.0) {
                Rng rng((cfg.seed + p) * 0x9e3779b97f4a7c15ull + nd * 131 + i);
                const double off = cfg.nodeJitter * (hi[i] - lo[i]) * (rng.uniform() - 0.5);
                xi = std::clamp(xi + off, lo[i], hi[i]);
              }
              table.coords[base * mesh.dim + i] = xi;
              w *= half * rule[q].second;
            }
            table.weights[base] = w;
          }
        }
      },
      cfg.threads);
  return table;
}

BoxQuadConfig refineConfig(const BoxQuadConfig& cfg) {
  BoxQuadConfig out = cfg;
  for (auto& axis : out.axes) {
    Partition1D fine;
    for (std::size_t i = 0; i + 1 < axis.edges.size(); ++i) {
      fine.edges.push_back(axis.edges[i]);
      fine.edges.push_back(0.5 * (axis.edges[i] + axis.edges[i + 1]));
    }
    fine.edges.push_back(axis.edges.back());
    axis = std::move(fine);
  }
  return out;
}

BoxQuadConfig coarsenConfig(const BoxQuadConfig& cfg) {
  BoxQuadConfig out = cfg;
  for (auto& axis : out.axes) {
    if (axis.edges.size() <= 2) continue;
    Partition1D coarse;
    for (std::size_t i = 0; i < axis.edges.size(); i += 2) coarse.edges.push_back(axis.edges[i]);
    if (coarse.edges.back() != axis.edges.back()) coarse.edges.push_back(axis.edges.back());
    axis = std::move(coarse);
  }
  return out;
}

std::size_t boxNodeCount(const BoxQuadConfig& cfg) {
  BoxMesh mesh(cfg);
  std::size_t perPanel = 1;
  for (int i = 0; i < mesh.dim; ++i) perPanel *= cfg.gaussOrder;
  return mesh.panels * perPanel;
}

void forEachBoxNode(const BoxQuadConfig& cfg,
                    const std::function<void(std::size_t, std::span<const double>, double)>& fn,
                    int threads) {
  BoxMesh mesh(cfg);
  const auto& rule = gaussRule(cfg.gaussOrder);
  std::size_t nodesPerPanel = 1;
  for (int i = 0; i < mesh.dim; ++i) nodesPerPanel *= cfg.gaussOrder;
  parallelChunks(
      mesh.panels,
      [&](std::size_t begin, std::size_t end) {
        double lo[6], hi[6];
        std::vector<double> x(mesh.dim);
        for (std::size_t p = begin; p < end; ++p) {
          mesh.panelBounds(p, lo, hi);
          for (std::size_t nd = 0; nd < nodesPerPanel; ++nd) {
            double w = 1.0;
            std::size_t rest = nd;
            for (int i = 0; i < mesh.dim; ++i) {
              const std::size_t q = rest % cfg.gaussOrder;
              rest /= cfg.gaussOrder;
              const double half = 0.5 * (hi[i] - lo[i]);
              double xi = 0.5 * (hi[i] + lo[i]) + half * rule[q].first;
              if (cfg.nodeJitter > 0.0) {
                Rng rng((cfg.seed + p) * 0x9e3779b97f4a7c15ull + nd * 131 + i);
                const double off = cfg.nodeJitter * (hi[i] - lo[i]) * (rng.uniform() - 0.5);
                xi = std::clamp(xi + off, lo[i], hi[i]);
              }
              x[i] = xi;
              w *= half * rule[q].second;
            }
            fn(p * nodesPerPanel + nd, x, w);
          }
        }
      },
      threads);
}

QuadResult integrateBallSmooth(const PointFunction& f, int dim, double radius,
                               int gaussOrder) {
  if (dim < 1 || dim > 4) throw std::invalid_argument("integrateBallSmooth: dim out of [1,4]");
  auto run = [&](int order) {
    const auto& rule = gaussRule(order);
    std::vector<double> x(dim);
    std::function<double(int, double)> level = [&](int axis, double r2) -> double {
      const double r = std::sqrt(std::max(0.0, r2));
      if (r == 0.0) return 0.0;
      double s = 0.0;
      for (const auto& [xi, wi] : rule) {
        // x_axis = r sin(phi), phi in [-pi/2, pi/2]
        const double phi = 0.5 * std::numbers::pi * xi;
        const double c = std::cos(phi);
        x[axis] = r * std::sin(phi);
        const double jac = 0.5 * std::numbers::pi * r * c;
        double inner;
        if (axis + 1 == dim)
          inner = f(x);
        else
          inner = level(axis + 1, r2 - x[axis] * x[axis]);
        s += wi * jac * inner;
      }
      return s;
    };
    return level(0, radius * radius);
  };
  QuadResult out;
  const double a = run(gaussOrder);
  const double b = run(gaussOrder + 6);
  out.value = b;
  out.errorEstimate = std::abs(b - a);
  std::uint64_t n1 = 1, n2 = 1;
  for (int i = 0; i < dim; ++i) {
    n1 *= gaussOrder;
    n2 *= gaussOrder + 6;
  }
  out.nodes = n1 + n2;
  return out;
}

namespace {

struct AdaptivePanel {
  double error;
  std::uint64_t stamp;
  std::vector<double> lo, hi;
  double valueHi;

  bool operator<(const AdaptivePanel& other) const {
    if (error != other.error) return error < other.error;
    return stamp > other.stamp;
  }
};

double rectGauss(const PointFunction& f, std::span<const double> lo,
                 std::span<const double> hi, int order) {
  const int dim = static_cast<int>(lo.size());
  const auto& rule = gaussRule(order);
  std::size_t nodes = 1;
  for (int i = 0; i < dim; ++i) nodes *= order;
  double s = 0.0;
  std::vector<double> x(dim);
  for (std::size_t nd = 0; nd < nodes; ++nd) {
    std::size_t rest = nd;
    double w = 1.0;
    for (int i = 0; i < dim; ++i) {
      const std::size_t q = rest % order;
      rest /= order;
      const double half = 0.5 * (hi[i] - lo[i]);
      x[i] = 0.5 * (hi[i] + lo[i]) + half * rule[q].first;
      w *= half * rule[q].second;
    }
    const double v = f(x);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "face quadrature: non-finite integrand at (";
      for (int i = 0; i < dim; ++i) os << (i ? "," : "") << x[i];
      os << ")";
      throw std::runtime_error(os.str());
    }
    s += w * v;
  }
  return s;
}

}  // namespace

QuadResult integrateRectangleAdaptive(const PointFunction& f,
                                      std::span<const double> lo,
                                      std::span<const double> hi,
                                      const FaceQuadConfig& cfg) {
  const int dim = static_cast<int>(lo.size());
  QuadResult out;
  std::priority_queue<AdaptivePanel> queue;
  std::uint64_t stamp = 0;
  int panelCount = 0;
  double totalError = 0.0;

  auto push = [&](std::vector<double> plo, std::vector<double> phi) {
    AdaptivePanel p;
    const double a = rectGauss(f, plo, phi, cfg.gaussOrder);
    const double b = rectGauss(f, plo, phi, cfg.gaussOrderHi);
    p.error = std::abs(b - a);
    p.valueHi = b;
    p.stamp = stamp++;
    p.lo = std::move(plo);
    p.hi = std::move(phi);
    totalError += p.error;
    queue.push(std::move(p));
    ++panelCount;
  };

  // Initial grid: supplied ambient-style partitions or uniform.
  std::vector<std::vector<double>> gridEdges(dim);
  for (int i = 0; i < dim; ++i) {
    if (static_cast<int>(cfg.faceAxes.size()) == dim && !cfg.faceAxes[i].edges.empty()) {
      for (double e : cfg.faceAxes[i].edges)
        if (e >= lo[i] - 1e-15 && e <= hi[i] + 1e-15) gridEdges[i].push_back(e);
      if (gridEdges[i].size() < 2) gridEdges[i] = {lo[i], hi[i]};
    } else {
      for (int j = 0; j <= cfg.initialPanels; ++j)
        gridEdges[i].push_back(lo[i] + (hi[i] - lo[i]) * static_cast<double>(j) /
                                            cfg.initialPanels);
    }
  }
  std::vector<std::size_t> counts(dim);
  std::size_t cells = 1;
  for (int i = 0; i < dim; ++i) {
    counts[i] = gridEdges[i].size() - 1;
    cells *= counts[i];
  }
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t rest = c;
    std::vector<double> plo(dim), phi(dim);
    for (int i = 0; i < dim; ++i) {
      const std::size_t q = rest % counts[i];
      rest /= counts[i];
      plo[i] = gridEdges[i][q];
      phi[i] = gridEdges[i][q + 1];
    }
    push(std::move(plo), std::move(phi));
  }

  while (totalError > cfg.tolerance && panelCount < cfg.maxPanels && !queue.empty()) {
    AdaptivePanel top = queue.top();
    if (top.error <= 0.0) break;
    queue.pop();
    totalError -= top.error;
    // Split along the widest axis.
    int axis = 0;
    double width = 0.0;
    for (int i = 0; i < dim; ++i) {
      if (top.hi[i] - top.lo[i] > width) {
        width = top.hi[i] - top.lo[i];
        axis = i;
      }
    }
    const double mid = 0.5 * (top.lo[axis] + top.hi[axis]);
    std::vector<double> lo1 = top.lo, hi1 = top.hi, lo2 = top.lo, hi2 = top.hi;
    hi1[axis] = mid;
    lo2[axis] = mid;
    push(std::move(lo1), std::move(hi1));
    push(std::move(lo2), std::move(hi2));
  }

  std::vector<double> vals;
  std::vector<double> errs;
  vals.reserve(queue.size());
  errs.reserve(queue.size());
  while (!queue.empty()) {
    vals.push_back(queue.top().valueHi);
    errs.push_back(queue.top().error);
    queue.pop();
  }
  // Pop order is deterministic given deterministic inputs.
  out.value = pairwiseReduce(vals);
  out.errorEstimate = pairwiseReduce(errs);
  out.nodes = static_cast<std::uint64_t>(panelCount);
  if (out.errorEstimate > cfg.tolerance * 64 && panelCount >= cfg.maxPanels)
    throw std::runtime_error("face quadrature: divergent panel refinement");
  return out;
}

namespace {

struct MultiPanel {
  double error;
  std::uint64_t stamp;
  std::vector<double> lo, hi;
  std::vector<double> valuesHi;

  bool operator<(const MultiPanel& other) const {
    if (error != other.error) return error < other.error;
    return stamp > other.stamp;
  }
};

void rectGaussMulti(const std::function<void(std::span<const double>, double*)>& f,
                    int K, std::span<const double> lo, std::span<const double> hi,
                    int order, double* out) {
  const int dim = static_cast<int>(lo.size());
  const auto& rule = gaussRule(order);
  std::size_t nodes = 1;
  for (int i = 0; i < dim; ++i) nodes *= order;
  for (int c = 0; c < K; ++c) out[c] = 0.0;
  std::vector<double> x(dim);
  std::vector<double> vals(K);
  for (std::size_t nd = 0; nd < nodes; ++nd) {
    std::size_t rest = nd;
    double w = 1.0;
    for (int i = 0; i < dim; ++i) {
      const std::size_t q = rest % order;
      rest /= order;
      const double half = 0.5 * (hi[i] - lo[i]);
      x[i] = 0.5 * (hi[i] + lo[i]) + half * rule[q].first;
      w *= half * rule[q].second;
    }
    f(x, vals.data());
    for (int c = 0; c < K; ++c) {
      if (!std::isfinite(vals[c]))
        throw std::runtime_error("adaptive quadrature: non-finite integrand component");
      out[c] += w * vals[c];
    }
  }
}

}  // namespace

MultiQuadResult integrateRectangleAdaptiveMulti(
    const std::function<void(std::span<const double>, double*)>& f, int K,
    std::span<const double> lo, std::span<const double> hi, const FaceQuadConfig& cfg) {
  const int dim = static_cast<int>(lo.size());
  std::priority_queue<MultiPanel> queue;
  std::uint64_t stamp = 0;
  int panelCount = 0;
  double totalError = 0.0;
  std::vector<double> a(K), b(K);

  auto push = [&](std::vector<double> plo, std::vector<double> phi) {
    MultiPanel p;
    rectGaussMulti(f, K, plo, phi, cfg.gaussOrder, a.data());
    rectGaussMulti(f, K, plo, phi, cfg.gaussOrderHi, b.data());
    p.error = 0.0;
    for (int c = 0; c < K; ++c) p.error += std::abs(b[c] - a[c]);
    p.valuesHi = b;
    p.stamp = stamp++;
    p.lo = std::move(plo);
    p.hi = std::move(phi);
    totalError += p.error;
    queue.push(std::move(p));
    ++panelCount;
  };

  {
    // Initial grid: supplied per-axis partitions when given (thin shells
    // must be visible to the first error estimates), else uniform.
    std::vector<std::vector<double>> gridEdges(dim);
    for (int i = 0; i < dim; ++i) {
      if (static_cast<int>(cfg.faceAxes.size()) == dim && !cfg.faceAxes[i].edges.empty()) {
        for (double e : cfg.faceAxes[i].edges)
          if (e >= lo[i] - 1e-15 && e <= hi[i] + 1e-15) gridEdges[i].push_back(e);
      }
      if (gridEdges[i].size() < 2) {
        gridEdges[i].clear();
        for (int j = 0; j <= cfg.initialPanels; ++j)
          gridEdges[i].push_back(lo[i] +
                                 (hi[i] - lo[i]) * static_cast<double>(j) / cfg.initialPanels);
      }
    }
    std::vector<std::size_t> counts(dim);
    std::size_t cells = 1;
    for (int i = 0; i < dim; ++i) {
      counts[i] = gridEdges[i].size() - 1;
      cells *= counts[i];
    }
    for (std::size_t cidx = 0; cidx < cells; ++cidx) {
      std::size_t rest = cidx;
      std::vector<double> plo(dim), phi(dim);
      for (int i = 0; i < dim; ++i) {
        const std::size_t q = rest % counts[i];
        rest /= counts[i];
        plo[i] = gridEdges[i][q];
        phi[i] = gridEdges[i][q + 1];
      }
      push(std::move(plo), std::move(phi));
    }
  }

  while (totalError > cfg.tolerance && panelCount < cfg.maxPanels && !queue.empty()) {
    MultiPanel top = queue.top();
    if (top.error <= 0.0) break;
    queue.pop();
    totalError -= top.error;
    int axis = 0;
    double width = 0.0;
    for (int i = 0; i < dim; ++i) {
      if (top.hi[i] - top.lo[i] > width) {
        width = top.hi[i] - top.lo[i];
        axis = i;
      }
    }
    const double mid = 0.5 * (top.lo[axis] + top.hi[axis]);
    std::vector<double> lo1 = top.lo, hi1 = top.hi, lo2 = top.lo, hi2 = top.hi;
    hi1[axis] = mid;
    lo2[axis] = mid;
    push(std::move(lo1), std::move(hi1));
    push(std::move(lo2), std::move(hi2));
  }

  MultiQuadResult out;
  out.values.assign(K, 0.0);
  out.panels = static_cast<std::uint64_t>(panelCount);
  std::vector<std::vector<double>> comps(K);
  std::vector<double> errs;
  while (!queue.empty()) {
    const MultiPanel& p = queue.top();
    for (int c = 0; c < K; ++c) comps[c].push_back(p.valuesHi[c]);
    errs.push_back(p.error);
    queue.pop();
  }
  for (int c = 0; c < K; ++c) out.values[c] = pairwiseReduce(comps[c]);
  out.errorEstimate = pairwiseReduce(errs);
  return out;
}

QuadResult integrateFaces(const FormField& omega, double a, const FaceQuadConfig& cfg) {
  const int N = omega.dim;
  if (omega.degree != N - 1)
    throw std::invalid_argument("integrateFaces: form degree must be N-1");
  QuadResult total;
  const std::uint32_t full = (1u << N) - 1u;
  auto wanted = [&](int axis, int sign) {
    if (cfg.faces.empty()) return true;
    for (const auto& [fa, fs] : cfg.faces)
      if (fa == axis && fs == sign) return true;
    return false;
  };
  for (int j = 0; j < N; ++j) {
    const std::uint32_t keepMask = full ^ (1u << j);
    for (int sgn = 1; sgn >= -1; sgn -= 2) {
      if (!wanted(j, sgn)) continue;
      FaceQuadConfig faceCfg = cfg;
      if (static_cast<int>(cfg.faceAxes.size()) == N) {
        faceCfg.faceAxes.clear();
        for (int i = 0; i < N; ++i)
          if (i != j) faceCfg.faceAxes.push_back(cfg.faceAxes[i]);
      }
      auto faceF = [&](std::span<const double> u) -> double {
        std::vector<double> x(N);
        int t = 0;
        for (int i = 0; i < N; ++i) {
          if (i == j)
            x[i] = sgn * a;
          else
            x[i] = u[t++];
        }
        return omega.eval(x).coefficient(keepMask);
      };
      std::vector<double> lo(N - 1, -a), hi(N - 1, a);
      QuadResult face = integrateRectangleAdaptive(faceF, lo, hi, faceCfg);
      const double orient = ((j % 2 == 0) ? 1.0 : -1.0) * sgn;
      total.value += orient * face.value;
      total.errorEstimate += face.errorEstimate;
      total.nodes += face.nodes;
    }
  }
  return total;
}

}  // namespace lavgap
