#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "neumax/errors.hpp"
#include "neumax/fem.hpp"
#include "neumax/specfun.hpp"

namespace neumax::fem {

std::vector<double> SpectralResult::products() const {
  std::vector<double> out;
  for (double mu : eigenvalues) out.push_back(mu * area);
  return out;
}

nlohmann::json spectral_to_json(const SpectralResult& result) {
  return {{"schema", 1},
          {"eigenvalues", result.eigenvalues},
          {"residuals", result.residuals},
          {"area", result.area},
          {"h", result.h},
          {"products", result.products()},
          {"lanczos_blocks", result.lanczos_steps}};
}

void spectral_to_csv(std::ostream& out, const SpectralResult& result) {
  out.precision(12);
  out << "index,eigenvalue,product,residual\n";
  const auto products = result.products();
  for (std::size_t i = 0; i < result.eigenvalues.size(); ++i) {
    out << i << ',' << result.eigenvalues[i] << ',' << products[i] << ',' << result.residuals[i] << '\n';
  }
}

bool CorpusReport::all_hold() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const CorpusEntry& e) { return e.error.empty() && e.szego_ok && e.thm_ok; });
}

CorpusReport verify_corpus(const std::vector<DomainSpec>& specs, double h, double tolerance) {
  CorpusReport report;
  report.tolerance = tolerance;
  report.szego_bound = specfun::szego_bound();
  report.theorem_bound = specfun::planar_bound();
  report.polya_bound = 8.0 * std::numbers::pi;
  for (const auto& spec : specs) {
    CorpusEntry entry;
    entry.spec = spec;
    entry.h = spec.h.value_or(h);
    try {
      const Mesh mesh = build_mesh(spec, entry.h);
      entry.result = neumann_eigs(mesh, 2);
      entry.mu1_area = entry.result->eigenvalues[1] * entry.result->area;
      entry.mu2_area = entry.result->eigenvalues[2] * entry.result->area;
      entry.szego_ok = entry.mu1_area <= report.szego_bound * (1.0 + tolerance);
      entry.thm_ok = entry.mu2_area <= report.theorem_bound * (1.0 + tolerance);
      entry.polya_ok = entry.mu2_area <= report.polya_bound * (1.0 + tolerance);
    } catch (const Error& e) {
      entry.error = e.what();
    }
    report.entries.push_back(std::move(entry));
  }
  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const CorpusEntry& a, const CorpusEntry& b) { return a.spec.id < b.spec.id; });
  return report;
}

nlohmann::json corpus_to_json(const CorpusReport& report) {
  nlohmann::json doc{{"schema", 1},
                     {"tolerance", report.tolerance},
                     {"bounds",
                      {{"szego", report.szego_bound}, {"thm1.1", report.theorem_bound}, {"polya-k2", report.polya_bound}}},
                     {"all_hold", report.all_hold()}};
  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json family = nlohmann::json::array();
  for (const auto& e : report.entries) {
    nlohmann::json row{{"id", e.spec.id}, {"spec", spec_to_json(e.spec)}, {"h", e.h}};
    if (!e.error.empty()) {
      row["error"] = e.error;
    } else {
      row["area"] = e.result->area;
      row["eigenvalues"] = e.result->eigenvalues;
      row["mu1_area"] = e.mu1_area;
      row["mu2_area"] = e.mu2_area;
      row["inequalities"] = {{{"tag", "szego"}, {"value", e.mu1_area}, {"holds", e.szego_ok}},
                             {{"tag", "thm1.1"}, {"value", e.mu2_area}, {"holds", e.thm_ok}},
                             {{"tag", "polya-k2"}, {"value", e.mu2_area}, {"holds", e.polya_ok}}};
      if (e.spec.kind == DomainKind::TwoDisksNeck) family.push_back({{"eps", e.spec.eps}, {"mu2_area", e.mu2_area}});
    }
    rows.push_back(row);
  }
  doc["domains"] = rows;
  if (!family.empty()) {
    std::sort(family.begin(), family.end(),
              [](const nlohmann::json& a, const nlohmann::json& b) { return a["eps"] > b["eps"]; });
    doc["two_disks_sequence"] = family;
  }
  return doc;
}

std::vector<DomainSpec> standard_corpus(std::uint64_t seed) {
  std::vector<DomainSpec> out{DomainSpec::rectangle(1.0, 1.0, "square"),
                              DomainSpec::rectangle(2.0, 1.0, "rectangle_2x1"),
                              DomainSpec::disk(1.0, "disk"),
                              DomainSpec::conformal({1.0, 0.0, 0.15}, "ellipse_a"),
                              DomainSpec::conformal({1.0, 0.0, 0.25}, "ellipse_b")};
  for (std::uint64_t k = 0; k < 5; ++k) out.push_back(perturbed_disk(seed * 5 + k + 1));
  return out;
}

}  // namespace neumax::fem
