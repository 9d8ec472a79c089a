#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "okb/classical.hpp"
#include "okb/envelope.hpp"
#include "okb/gram.hpp"
#include "okb/report.hpp"
#include "okb/semigroup.hpp"
#include "okb/toric.hpp"
#include "okb/util.hpp"
#include "okb/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitAcceptance = 4;

namespace fs = std::filesystem;
using okb::Json;

struct Common {
  std::string out_dir = "out";
  std::uint64_t seed = 0;
};

void ensure_out(const Common& c) { fs::create_directories(c.out_dir); }

std::string out_path(const Common& c, const std::string& name) {
  return (fs::path(c.out_dir) / name).string();
}

void emit_report(const Common& c, const std::string& name, const Json& report) {
  okb::write_text_file(out_path(c, name), report.dump(2) + "\n");
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::istringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(std::stoll(cell));
  if (out.empty()) throw std::invalid_argument("expected a comma-separated list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(std::stod(cell));
  if (out.empty()) throw std::invalid_argument("expected a comma-separated list");
  return out;
}

// Accepts a literal JSON object or a path to a JSON file.
std::string json_or_file(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return arg;
  return okb::read_text_file(arg);
}

Json field_sidecar(const okb::ChebyshevField& f, std::int64_t horizon) {
  Json side;
  auto verts = Json::array();
  for (const auto& v : f.body.vertices) {
    auto row = Json::array();
    for (int i = 0; i < f.body.n; ++i) row.push_back(v[i]);
    verts.push_back(row);
  }
  side["body_vertices"] = verts;
  side["grid_spacing"] = f.grid.h;
  side["margin_cells"] = f.grid.margin_cells;
  side["horizon"] = horizon;
  side["convexified"] = f.convexified;
  return side;
}

// ---------------------------------------------------------------------------

int cmd_okounkov(const Common& c, const std::string& config_path,
                 std::int64_t k_max, const std::string& probe_range,
                 double probe_cap, bool slices_csv) {
  std::string text = json_or_file(config_path);
  okb::GradedSemigroup sg = okb::semigroup_from_json(text);
  Json config;
  config["semigroup"] = Json::parse(okb::semigroup_to_json(sg));
  config["k_max"] = k_max;
  config["probe_range"] = probe_range;
  config["probe_cap"] = probe_cap;
  Json report = okb::base_report("okounkov", config);
  sg.enumerate_levels(std::max<std::int64_t>(
      k_max, probe_range.empty() ? 0 : parse_int_list(probe_range).back()));
  auto body = sg.okounkov_body(k_max);
  auto verts = Json::array();
  for (const auto& v : body.body.vertices) {
    auto row = Json::array();
    for (int i = 0; i < sg.dim(); ++i) row.push_back(v[i]);
    verts.push_back(row);
  }
  report["body"] = {{"vertices", verts},
                    {"volume", body.body.volume()},
                    {"degenerate", body.body.degenerate},
                    {"monotone_certified", body.monotone_certified}};
  if (!probe_range.empty()) {
    auto range = parse_int_list(probe_range);
    if (range.size() != 2)
      throw std::invalid_argument("--probe-range expects 'k_lo,k_hi'");
    auto probe = sg.khovanskii_threshold_probe(range[0], range[1], probe_cap);
    Json viol = Json::array();
    for (const auto& v : probe.violations)
      viol.push_back({{"level", v.level}, {"scaled_distance", v.scaled_distance}});
    report["probe"] = {{"c_min", probe.c_min},
                       {"within_cap", probe.within_cap},
                       {"violations", viol}};
  }
  if (slices_csv) {
    std::string csv = "level";
    for (int i = 0; i < sg.dim(); ++i) csv += ",a" + std::to_string(i + 1);
    csv += "\n";
    char buf[128];
    for (std::int64_t k = 1; k <= k_max; ++k)
      for (const auto& a : sg.slice(k)) {
        std::string line = std::to_string(k);
        for (int i = 0; i < sg.dim(); ++i) {
          std::snprintf(buf, sizeof(buf), ",%lld", static_cast<long long>(a[i]));
          line += buf;
        }
        csv += line + "\n";
      }
    okb::write_text_file(out_path(c, "slices.csv"), csv);
  }
  emit_report(c, "okounkov_report.json", report);
  std::cout << "okounkov: volume " << body.body.volume() << ", report in "
            << c.out_dir << "\n";
  return kExitOk;
}

int cmd_envelope(const Common& c, const std::string& table_kind, std::int64_t K,
                 int cells) {
  Json config{{"table", table_kind}, {"K", K}, {"cells", cells}};
  if (table_kind != "binomial")
    throw std::invalid_argument("envelope: supported table kinds: binomial");
  Json report = okb::base_report("envelope", config);
  auto table = okb::binomial_table(K);
  auto field = okb::envelope_estimate(table, K, cells, 2);
  auto audit = field.audit_convexity(1e-8);
  okb::write_text_file(out_path(c, "envelope_field.csv"), field.to_csv());
  emit_report(c, "envelope_field.meta.json", field_sidecar(field, K));
  report["convexity_audit"] = {{"pass", audit.pass},
                               {"worst_violation", audit.worst_violation}};
  report["lower_bound_constant"] = table.fitted_lower_bound_constant();
  emit_report(c, "envelope_report.json", report);
  std::cout << "envelope: field written, audit "
            << (audit.pass ? "pass" : "FAIL") << "\n";
  return kExitOk;
}

int cmd_toric_energy(const Common& c, const std::string& psi_path,
                     const std::string& phi_path, const std::string& route) {
  okb::ToricWeight psi = okb::weight_from_json(json_or_file(psi_path));
  okb::ToricWeight phi = okb::weight_from_json(json_or_file(phi_path));
  Json config{{"psi", Json::parse(okb::weight_to_json(psi))},
              {"phi", Json::parse(okb::weight_to_json(phi))},
              {"route", route}};
  Json report = okb::base_report("toric-energy", config);
  report["ma_convention"] = "mass(MA pushforward) = vol(polytope)";
  auto routes = Json::array();
  if (route == "legendre" || route == "both") {
    auto e = okb::energy_legendre(psi, phi);
    routes.push_back({{"route", e.route},
                      {"value", e.value},
                      {"error_estimate", e.error_estimate}});
  }
  if (route == "ma" || route == "both") {
    auto e = okb::energy_ma_1d(psi, phi);
    routes.push_back({{"route", e.route},
                      {"value", e.value},
                      {"error_estimate", e.error_estimate},
                      {"auto_projected", e.auto_projected},
                      {"mass_psi", e.mass_psi},
                      {"mass_phi", e.mass_phi}});
  }
  if (routes.empty())
    throw std::invalid_argument("toric-energy: route must be legendre|ma|both");
  report["energies"] = routes;
  emit_report(c, "energy_report.json", report);
  std::cout << "toric-energy:";
  for (const auto& r : routes)
    std::cout << " " << r.at("route").get<std::string>() << "="
              << r.at("value").get<double>();
  std::cout << "\n";
  return kExitOk;
}

int cmd_lk_ladder(const Common& c, const std::string& psi_path,
                  const std::string& phi_path, const std::string& ks_text,
                  bool plot, int quad_order) {
  okb::ToricWeight psi = okb::weight_from_json(json_or_file(psi_path));
  okb::ToricWeight phi = okb::weight_from_json(json_or_file(phi_path));
  auto ks = parse_int_list(ks_text);
  Json config{{"psi", Json::parse(okb::weight_to_json(psi))},
              {"phi", Json::parse(okb::weight_to_json(phi))},
              {"k", ks_text},
              {"quad_order", quad_order}};
  Json report = okb::base_report("lk-ladder", config);
  auto ladder = okb::donaldson_ladder(psi, phi, ks, quad_order);
  std::string csv = ladder.to_csv();
  okb::write_text_file(out_path(c, "lk_ladder.csv"), csv);
  report["route_a_value"] = ladder.route_a_value;
  report["fitted_det_sum_ratio"] = ladder.fitted_ratio;
  report["final_gap"] = ladder.gaps.back();
  emit_report(c, "lk_report.json", report);
  if (plot)
    okb::write_text_file(out_path(c, "lk_ladder.svg"),
                         okb::svg_plot_from_csv(csv, "ladder"));
  std::cout << "lk-ladder: final gap " << ladder.gaps.back() << "\n";
  return kExitOk;
}

int cmd_cheb1d(const Common& c, const std::string& set_spec, int k_max) {
  okb::CompactSet set = okb::CompactSet::from_json(json_or_file(set_spec));
  Json config{{"set", Json::parse(set.to_json())}, {"k_max", k_max}};
  Json report = okb::base_report("cheb1d", config);
  auto h1 = okb::AdmissibleWeight::one();
  auto cfit = okb::chebyshev_constant(set, h1, k_max);
  auto tfit = okb::transfinite_diameter(set, std::max((5 * k_max) / 3, 4));
  auto fieldres = okb::chebyshev_field_p1(set, k_max);
  okb::write_text_file(out_path(c, "chebyshev_ladder.csv"), cfit.to_csv("Y_k"));
  okb::write_text_file(out_path(c, "transfinite_ladder.csv"),
                       tfit.to_csv("log_dk"));
  okb::write_text_file(out_path(c, "cheb_field.csv"), fieldres.field.to_csv());
  emit_report(c, "cheb_field.meta.json", field_sidecar(fieldres.field, k_max));
  report["chebyshev_constant"] = {{"last", cfit.last}, {"fitted", cfit.fitted}};
  report["transfinite_diameter"] = {{"last", tfit.last}, {"fitted", tfit.fitted}};
  report["field_fitted_slope"] = fieldres.fitted_slope;
  report["two_ln_C"] = 2.0 * std::log(cfit.fitted);
  emit_report(c, "cheb1d_report.json", report);
  std::cout << "cheb1d: C " << cfit.fitted << ", T " << tfit.fitted << "\n";
  return kExitOk;
}

int cmd_directional(const Common& c, const std::string& config_text) {
  Json j = Json::parse(json_or_file(config_text));
  okb::CompactSet k1 = okb::CompactSet::from_json(j.at("k1").dump());
  okb::CompactSet k2 = okb::CompactSet::from_json(j.at("k2").dump());
  std::array<double, 2> theta{j.at("theta").at(0).get<double>(),
                              j.at("theta").at(1).get<double>()};
  std::vector<std::int64_t> degrees;
  for (const auto& d : j.at("degrees")) degrees.push_back(d.get<std::int64_t>());
  int per_axis = j.value("per_axis", 20);
  Json report = okb::base_report("directional", j);
  auto set = okb::CompactSet2::product(k1, k2, per_axis);
  auto res = okb::directional_chebyshev(set, okb::AdmissibleWeight2::one(), theta,
                                        degrees);
  std::string csv = "deg,tau\n";
  char buf[80];
  for (std::size_t i = 0; i < res.degrees.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%lld,%.12g\n",
                  static_cast<long long>(res.degrees[i]), res.taus[i]);
    csv += buf;
  }
  okb::write_text_file(out_path(c, "directional_ladder.csv"), csv);
  report["extrapolated_tau"] = res.extrapolated;
  report["warned"] = res.warned;
  emit_report(c, "directional_report.json", report);
  std::cout << "directional: tau " << res.extrapolated << "\n";
  return kExitOk;
}

int cmd_zero_fiber(const Common& c, const std::string& psi_path,
                   const std::string& alphas_text) {
  okb::ToricWeight psi = okb::weight_from_json(json_or_file(psi_path));
  auto alphas = parse_double_list(alphas_text);
  Json config{{"psi", Json::parse(okb::weight_to_json(psi))},
              {"alpha", alphas_text}};
  Json report = okb::base_report("zero-fiber", config);
  auto rows = Json::array();
  for (double a : alphas) {
    auto z = okb::zero_fiber_restriction(psi, a);
    rows.push_back({{"alpha", a},
                    {"c_full", z.c_full},
                    {"c_restricted", z.c_restricted},
                    {"difference", z.difference},
                    {"converged", z.converged}});
  }
  report["values"] = rows;
  emit_report(c, "zero_fiber_report.json", report);
  std::cout << "zero-fiber: " << rows.size() << " values written\n";
  return kExitOk;
}

int cmd_derivative(const Common& c, const std::string& psi_path,
                   const std::string& phi_path, const std::string& direction,
                   double t_step) {
  okb::ToricWeight psi = okb::weight_from_json(json_or_file(psi_path));
  okb::ToricWeight phi = okb::weight_from_json(json_or_file(phi_path));
  okb::GTermPtr u;
  if (direction == "constant")
    u = okb::constant_term(1, 1.0);
  else if (direction == "bump")
    u = okb::quadratic_bump_term(1, {0.0, 0.0}, 1.0, 1.0);
  else
    throw std::invalid_argument("derivative-check: direction must be constant|bump");
  Json config{{"psi", Json::parse(okb::weight_to_json(psi))},
              {"phi", Json::parse(okb::weight_to_json(phi))},
              {"direction", direction},
              {"t_step", t_step}};
  Json report = okb::base_report("derivative-check", config);
  auto rep = okb::derivative_check_1d(psi, phi, u, t_step);
  report["fd_value"] = rep.fd_value;
  report["formula_value"] = rep.formula_value;
  report["difference"] = rep.difference;
  emit_report(c, "derivative_report.json", report);
  std::cout << "derivative-check: fd " << rep.fd_value << " vs formula "
            << rep.formula_value << "\n";
  return kExitOk;
}

int cmd_verify(const Common& c, const std::string& profile,
               const std::string& corrupt, const std::string& only) {
  if (profile != "quick" && profile != "full")
    throw std::invalid_argument("verify: profile must be quick|full");
  okb::AcceptanceOptions opts;
  opts.quick = (profile == "quick");
  opts.corrupt = corrupt;
  opts.only = only;
  opts.seed = c.seed;
  Json config{{"profile", profile}, {"seed", c.seed}};
  if (!corrupt.empty()) config["corrupt"] = corrupt;
  Json report = okb::base_report("verify", config);
  auto results = okb::run_acceptance(opts);
  auto rows = Json::array();
  bool all_pass = true;
  std::vector<std::string> failures;
  for (const auto& r : results) {
    std::cout << okb::format_criterion_line(r) << "\n";
    // Timing stays on stdout: reports must be byte-identical across runs.
    rows.push_back({{"id", r.id},
                    {"name", r.name},
                    {"pass", r.pass},
                    {"detail", r.detail}});
    if (!r.pass) {
      all_pass = false;
      failures.push_back(std::to_string(r.id) + ":" + r.name);
    }
  }
  report["criteria"] = rows;
  report["all_pass"] = all_pass;
  emit_report(c, "verify_report.json", report);
  if (!all_pass) {
    std::cout << "FAILED criteria:";
    for (const auto& f : failures) std::cout << " " << f;
    std::cout << "\n";
    return kExitAcceptance;
  }
  std::cout << "all acceptance criteria pass\n";
  return kExitOk;
}

int cmd_plot(const Common& c, const std::string& table, const std::string& kind,
             const std::string& out_name) {
  std::string csv = okb::read_text_file(table);
  std::string svg = okb::svg_plot_from_csv(csv, kind);
  okb::write_text_file(out_path(c, out_name), svg);
  std::cout << "plot: wrote " << out_path(c, out_name) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Okounkov bodies, Chebyshev transforms and relative energies"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--out", common.out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", common.seed, "seed for randomized checks")
      ->capture_default_str();

  std::string config_path, probe_range, psi_path, phi_path, route = "both";
  std::string ks_text = "16,32,64", set_spec, direction = "bump";
  std::string profile = "quick", corrupt, table_path, plot_kind = "ladder";
  std::string plot_out = "plot.svg", table_kind = "binomial", alphas = "0.25,0.5,0.75";
  std::int64_t k_max = 12, env_K = 200;
  int cells = 100, cheb_kmax = 24, quad_order = 0;
  double probe_cap = 16.0, t_step = 1e-4;
  bool slices = false, do_plot = false;

  auto* sc_ok = app.add_subcommand("okounkov", "semigroup bodies and probes");
  sc_ok->add_option("--config", config_path, "semigroup JSON (file or literal)")
      ->required();
  sc_ok->add_option("--kmax", k_max, "level horizon")->capture_default_str();
  sc_ok->add_option("--probe-range", probe_range, "khovanskii probe 'k_lo,k_hi'");
  sc_ok->add_option("--probe-cap", probe_cap, "probe C cap")->capture_default_str();
  sc_ok->add_flag("--slices-csv", slices, "emit level slices as CSV");

  auto* sc_env = app.add_subcommand("envelope", "subadditive envelope estimate");
  sc_env->add_option("--table", table_kind, "table kind (binomial)")
      ->capture_default_str();
  sc_env->add_option("--K", env_K, "table horizon")->capture_default_str();
  sc_env->add_option("--cells", cells, "grid cells per axis")->capture_default_str();

  auto* sc_te = app.add_subcommand("toric-energy", "relative energy routes");
  sc_te->add_option("--psi", psi_path, "weight JSON (file or literal)")->required();
  sc_te->add_option("--phi", phi_path, "weight JSON (file or literal)")->required();
  sc_te->add_option("--route", route, "legendre|ma|both")->capture_default_str();

  auto* sc_lk = app.add_subcommand("lk-ladder", "Donaldson L_k ladder");
  sc_lk->add_option("--psi", psi_path, "weight JSON")->required();
  sc_lk->add_option("--phi", phi_path, "weight JSON")->required();
  sc_lk->add_option("--k", ks_text, "comma-separated levels")->capture_default_str();
  sc_lk->add_option("--quad-order", quad_order, "per-panel quadrature order (0 = auto)")
      ->capture_default_str();
  sc_lk->add_flag("--plot", do_plot, "emit SVG of the ladder");

  auto* sc_ch = app.add_subcommand("cheb1d", "classical constants and the field");
  sc_ch->add_option("--set", set_spec, "compact set JSON (file or literal)")
      ->required();
  sc_ch->add_option("--kmax", cheb_kmax, "ladder top")->capture_default_str();

  auto* sc_dir = app.add_subcommand("directional", "directional Chebyshev constants");
  sc_dir->add_option("--config", config_path, "directional config JSON")->required();

  auto* sc_zf = app.add_subcommand("zero-fiber", "zero-fiber restriction check");
  sc_zf->add_option("--psi", psi_path, "n=2 weight JSON")->required();
  sc_zf->add_option("--alpha", alphas, "comma-separated alphas")
      ->capture_default_str();

  auto* sc_dc = app.add_subcommand("derivative-check", "energy derivative check");
  sc_dc->add_option("--psi", psi_path, "weight JSON")->required();
  sc_dc->add_option("--phi", phi_path, "weight JSON")->required();
  sc_dc->add_option("--direction", direction, "constant|bump")->capture_default_str();
  sc_dc->add_option("--tstep", t_step, "finite-difference step")
      ->capture_default_str();

  std::string only;
  auto* sc_v = app.add_subcommand("verify", "acceptance criteria battery");
  sc_v->add_option("--profile", profile, "quick|full")->capture_default_str();
  sc_v->add_option("--corrupt", corrupt, "test hook: criterion id to corrupt")
      ->group("");  // hidden
  sc_v->add_option("--only", only, "run a single criterion id")->group("");

  auto* sc_plot = app.add_subcommand("plot", "SVG plot from a CSV table");
  sc_plot->add_option("--table", table_path, "CSV path")->required();
  sc_plot->add_option("--kind", plot_kind, "ladder|field")->capture_default_str();
  sc_plot->add_option("--out-file", plot_out, "SVG filename")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    ensure_out(common);
    if (sc_ok->parsed())
      return cmd_okounkov(common, config_path, k_max, probe_range, probe_cap,
                          slices);
    if (sc_env->parsed()) return cmd_envelope(common, table_kind, env_K, cells);
    if (sc_te->parsed()) return cmd_toric_energy(common, psi_path, phi_path, route);
    if (sc_lk->parsed())
      return cmd_lk_ladder(common, psi_path, phi_path, ks_text, do_plot,
                           quad_order);
    if (sc_ch->parsed()) return cmd_cheb1d(common, set_spec, cheb_kmax);
    if (sc_dir->parsed()) return cmd_directional(common, config_path);
    if (sc_zf->parsed()) return cmd_zero_fiber(common, psi_path, alphas);
    if (sc_dc->parsed())
      return cmd_derivative(common, psi_path, phi_path, direction, t_step);
    if (sc_v->parsed()) return cmd_verify(common, profile, corrupt, only);
    if (sc_plot->parsed()) return cmd_plot(common, table_path, plot_kind, plot_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    try {
      Json diag{{"error", e.what()}};
      emit_report(common, "failure_report.json",
                  okb::base_report("failure", diag));
    } catch (...) {
    }
    return kExitNumerical;
  }
  return kExitConfig;
}
