#include "tsdia/cli/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace tsdia::cli {

namespace {

// Stride of `fine` that lands on the nodes of `coarse`, or 0 when the grids do not align.
int alignment_stride(const TimeGrid& coarse, const TimeGrid& fine) {
  const double ratio = coarse.dt() / fine.dt();
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) return 0;
  return static_cast<int>(rounded);
}

double se_at(const GreenFunction& g, int i) { return g.std_error ? (*g.std_error)(i, 0) : 0.0; }

}  // namespace

CurveComparison compare_curves(const GreenFunction& reference, const GreenFunction& candidate,
                               const Tolerances& tol) {
  CurveComparison out;
  out.reference = reference.label;
  out.candidate = candidate.label;

  const bool ref_coarse = reference.grid.dt() >= candidate.grid.dt();
  const TimeGrid& coarse = ref_coarse ? reference.grid : candidate.grid;
  const TimeGrid& fine = ref_coarse ? candidate.grid : reference.grid;
  const int stride = alignment_stride(coarse, fine);
  if (stride == 0) {
    std::ostringstream os;
    os << "grid mismatch: dt " << reference.grid.dt() << " vs " << candidate.grid.dt();
    throw GridMismatch(os.str());
  }
  const int nodes = std::min(coarse.size(), fine.steps() / stride + 1);

  double sum_sq = 0.0;
  int within = 0;
  for (int k = 0; k < nodes; ++k) {
    const int ir = ref_coarse ? k : k * stride;
    const int ic = ref_coarse ? k * stride : k;
    const std::complex<double> diff = candidate.values[ic] - reference.values[ir];
    const double err = std::abs(diff);
    out.max_abs = std::max(out.max_abs, err);
    sum_sq += err * err;
    const double se = std::hypot(se_at(reference, ir), se_at(candidate, ic));
    if (se > 0.0) {
      const double z = diff.real() / se;
      out.times.push_back(coarse.node(k));
      out.z.push_back(z);
      out.max_abs_z = std::max(out.max_abs_z, std::abs(z));
      within += std::abs(z) <= tol.z_max ? 1 : 0;
    }
  }
  out.rms = std::sqrt(sum_sq / nodes);
  out.z_nodes = static_cast<int>(out.z.size());
  out.z_fraction = out.z_nodes > 0 ? static_cast<double>(within) / out.z_nodes : 1.0;

  if (tol.max_abs && !(out.max_abs <= *tol.max_abs)) out.pass = false;
  if (tol.rms && !(out.rms <= *tol.rms)) out.pass = false;
  if (out.z_nodes > 0 && out.z_fraction < tol.z_fraction) out.pass = false;
  return out;
}

Json to_json(const CurveComparison& c, bool with_nodes) {
  Json j = {{"reference", c.reference}, {"candidate", c.candidate}, {"max_abs", c.max_abs},
            {"rms", c.rms},             {"max_abs_z", c.max_abs_z}, {"z_fraction", c.z_fraction},
            {"z_nodes", c.z_nodes},     {"pass", c.pass}};
  if (with_nodes) {
    j["t"] = c.times;
    j["z"] = c.z;
  }
  return j;
}

Json to_json(const ComparisonReport& r) {
  Json tol = {{"z_max", r.tolerances.z_max}, {"z_fraction", r.tolerances.z_fraction}};
  if (r.tolerances.max_abs) tol["max_abs"] = *r.tolerances.max_abs;
  if (r.tolerances.rms) tol["rms"] = *r.tolerances.rms;
  Json comps = Json::array();
  for (const auto& c : r.comparisons) comps.push_back(to_json(c, true));
  return {{"tolerances", tol}, {"comparisons", comps}, {"pass", r.pass}};
}

void write_atomically(const std::filesystem::path& file,
                      const std::function<void(const std::filesystem::path&)>& write) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  write(tmp);
  std::filesystem::rename(tmp, file);
}

void write_json_atomically(const std::filesystem::path& file, const Json& j) {
  write_atomically(file, [&](const std::filesystem::path& tmp) {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << j.dump(2) << '\n';
  });
}

}  // namespace tsdia::cli
