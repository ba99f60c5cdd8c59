#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spectral_lab/bound_verifier.hpp"

namespace spectral_lab {

/// A domain as written in a config: halfplane, hyperbola(a, b), parabola(p)
/// or the sector-approx preset, Hyperbola(a, a tan alpha) with a = 1e-3.
struct DomainSpec {
  std::string kind = "halfplane";
  double a = 0.0;
  double b = 0.0;
  double p = 0.0;
  double alpha = 0.0;

  ConvexDomain build() const;
  bool operator==(const DomainSpec&) const = default;
};

/// "halfplane", "hyperbola:a,b", "parabola:p" or "sector-approx:alpha".
DomainSpec parse_domain_spec(std::string_view text);

struct OutputSpec {
  std::string csv_path;
  std::string json_path;
  std::string svg_path;

  bool operator==(const OutputSpec&) const = default;
};

struct CampaignConfig {
  std::vector<DomainSpec> domains;
  std::vector<EnsembleSpec> ensembles;
  std::vector<NamedFunction> functions;
  double quad_tol = 1e-8;
  double slack_factor = 10.0;
  int n_angles = 256;
  int lemma1_samples = 32;
  double damping_eps = 0.1;
  std::uint64_t seed = 1;
  bool regularization = true;
  OutputSpec outputs;

  CampaignDesign design() const;
};

bool operator==(const EnsembleSpec& x, const EnsembleSpec& y);
bool operator==(const NamedFunction& x, const NamedFunction& y);
bool operator==(const CampaignConfig& x, const CampaignConfig& y);

/// Three simple poles with random residues, mirrored into Re p < 0.
RationalFunction random_partial_fraction(int n_poles, std::uint64_t seed);

std::vector<DomainSpec> default_domains();
std::vector<EnsembleSpec> default_ensembles();
/// resolvent 1/(z+1), cayley (z−1)/(z+1), resolvent2 1/(z+1)², random3.
std::vector<NamedFunction> default_functions();
CampaignConfig default_config();

/// Validates and fills defaults. Errors are Config errors whose message
/// starts with the JSON pointer of the offending field.
CampaignConfig parse_config(std::string_view text);
CampaignConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const CampaignConfig& config);
std::string serialize_config(const CampaignConfig& config);
CampaignConfig load_config(const std::string& path);

/// 17 significant digits, locale-free, with a '.' decimal point.
std::string format_number(double v);

inline constexpr const char* kCsvHeader =
    "trial_id,seed,domain_kind,alpha,n,ensemble,function_id,sup_norm_f,norm_fA,ratio,k_alpha,"
    "ratio_over_k,lemma1_margin,lemma2_margin,schwenninger_residual,adjoint_residual,quad_error";

std::string report_csv(const CampaignReport& report);
nlohmann::json domain_to_json(const ConvexDomain& d);
nlohmann::json report_json(const CampaignReport& report, const CampaignConfig& config);
/// Domain boundary, W(A) of the worst-ratio trial and the node density of
/// its quadrature; only the boundary of the first domain when there are no trials.
std::string report_svg(const CampaignReport& report, const CampaignConfig& config);

void write_text_file(const std::string& path, std::string_view content);
/// Fails with an Io error when an output path cannot be opened for writing.
void check_outputs_writable(const OutputSpec& outputs);
/// Writes every output named in config.outputs.
void emit_report(const CampaignReport& report, const CampaignConfig& config);

struct SweepRow {
  double alpha = 0.0;
  double k_alpha = 0.0;
  double max_ratio = 0.0;
  double max_ratio_over_k = 0.0;
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::size_t failures = 0;
};

/// Domain used at grid point α: parabola(1) at 0, the half-plane at π/2 and
/// Hyperbola(1, tan α) in between.
ConvexDomain sweep_domain(double alpha);

/// K(α) next to the empirical max ratio on `points` equally spaced α in
/// [0, π/2], using the ensembles and functions of `base` with every ensemble
/// count replaced by `count` (when positive).
std::vector<SweepRow> sweep_alpha(const CampaignConfig& base, int points, int count,
                                  std::size_t threads = 0);

}  // namespace spectral_lab
