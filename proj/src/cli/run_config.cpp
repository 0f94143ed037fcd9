#include "dged/cli/run_config.hpp"

#include <fstream>

namespace dged::cli {

using nlohmann::json;

namespace {

const json& require(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw ConfigError(std::string("config: missing key \"") + key + "\"");
  return *it;
}

double number_or(const json& doc, const char* key, double fallback) {
  const auto it = doc.find(key);
  if (it == doc.end()) return fallback;
  if (!it->is_number()) throw ConfigError(std::string("config: \"") + key + "\" must be a number");
  return it->get<double>();
}

RateKernel kernel_from_json(const json& spec, const std::filesystem::path& base_dir, json& echo) {
  if (!spec.is_object() || !spec.contains("name"))
    throw ConfigError("config: kernel must be an object with a \"name\"");
  const std::string name = spec.at("name").get<std::string>();
  echo = json{{"name", name}};

  if (name == "constant") {
    const double value = number_or(spec, "value", 1.0);
    echo["value"] = value;
    if (!(value >= 0.0)) throw ConfigError("config: constant kernel value must be >= 0");
    return RateKernel::constant(value);
  }
  if (name == "unbounded_example") return RateKernel::unbounded_example();
  if (name == "edg_constant") {
    const double k0 = number_or(spec, "K0", 1.0);
    echo["K0"] = k0;
    if (!(k0 >= 0.0)) throw ConfigError("config: edg_constant K0 must be >= 0");
    return make_edg_kernel("edg_constant", [k0](int, int) { return k0; });
  }
  if (name == "edg_product") {
    const double c0 = number_or(spec, "C0", 1.0);
    echo["C0"] = c0;
    if (!(c0 >= 0.0)) throw ConfigError("config: edg_product C0 must be >= 0");
    return make_edg_kernel("edg_product",
                           [c0](int i, int j) { return c0 * static_cast<double>(i) * j; });
  }
  if (name == "coagfrag_constant") {
    const double a0 = number_or(spec, "a0", 2.0);
    const double b0 = number_or(spec, "b0", 0.0);
    const double c00 = number_or(spec, "c00", 1.0);
    echo["a0"] = a0;
    echo["b0"] = b0;
    echo["c00"] = c00;
    if (!(a0 >= 0.0) || !(b0 >= 0.0)) throw ConfigError("config: coag/frag rates must be >= 0");
    if (!(c00 > 0.0)) throw ConfigError("config: coagfrag c00 must be > 0");
    return make_coagfrag_kernel(
        "coagfrag_constant", [a0](int, int) { return a0; }, [b0](int, int) { return b0; }, c00);
  }
  if (name == "coagfrag_additive") {
    const double b0 = number_or(spec, "b0", 1.0);
    const double c00 = number_or(spec, "c00", 1.0);
    echo["b0"] = b0;
    echo["c00"] = c00;
    if (!(b0 >= 0.0)) throw ConfigError("config: coagfrag b0 must be >= 0");
    if (!(c00 > 0.0)) throw ConfigError("config: coagfrag c00 must be > 0");
    return make_coagfrag_kernel(
        "coagfrag_additive", [](int i, int j) { return static_cast<double>(i + j); },
        [b0](int, int) { return b0; }, c00);
  }
  if (name == "table") {
    if (!spec.contains("path")) throw ConfigError("config: table kernel needs a \"path\"");
    const std::filesystem::path raw = spec.at("path").get<std::string>();
    const std::filesystem::path resolved = raw.is_absolute() ? raw : base_dir / raw;
    echo["path"] = resolved.string();
    try {
      return load_table_kernel(resolved);
    } catch (const std::exception& failure) {
      throw ConfigError(failure.what());
    }
  }
  throw ConfigError("config: unknown kernel \"" + name + "\"");
}

InitialSpec initial_from_json(const json& spec, int truncation, json& echo) {
  if (!spec.is_object() || !spec.contains("shape"))
    throw ConfigError("config: initial must be an object with a \"shape\"");
  const std::string shape = spec.at("shape").get<std::string>();
  InitialSpec initial;
  initial.truncation = truncation;
  if (shape == "monodisperse") {
    Monodisperse mono;
    mono.size = spec.value("size", 1);
    mono.amount = number_or(spec, "amount", 1.0);
    echo = json{{"shape", "monodisperse"}, {"size", mono.size}, {"amount", mono.amount}};
    initial.shape = mono;
    return initial;
  }
  if (shape == "geometric") {
    Geometric geo;
    geo.ratio = number_or(spec, "ratio", 0.5);
    geo.amount = number_or(spec, "amount", 1.0);
    echo = json{{"shape", "geometric"}, {"ratio", geo.ratio}, {"amount", geo.amount}};
    initial.shape = geo;
    return initial;
  }
  if (shape == "explicit") {
    if (!spec.contains("values") || !spec.at("values").is_array())
      throw ConfigError("config: explicit initial needs a \"values\" array");
    ExplicitProfile profile;
    for (const auto& v : spec.at("values")) profile.values.push_back(v.get<double>());
    echo = json{{"shape", "explicit"}, {"values", spec.at("values")}};
    initial.shape = profile;
    return initial;
  }
  throw ConfigError("config: unknown initial shape \"" + shape + "\"");
}

IntegratorConfig integrator_from_json(const json& spec, json& echo) {
  IntegratorConfig config;
  const std::string method = spec.value("method", std::string("rk45"));
  if (method == "rk45")
    config.method = Method::AdaptiveRK45;
  else if (method == "rk4")
    config.method = Method::FixedRK4;
  else
    throw ConfigError("config: integrator method must be rk45 or rk4");
  config.rtol = number_or(spec, "rtol", 1e-9);
  config.atol = number_or(spec, "atol", 1e-12);
  config.h_init = number_or(spec, "h_init", 1e-3);
  config.h_max = number_or(spec, "h_max", 10.0);
  config.negativity_floor = number_or(spec, "negativity_floor", 1e-14);
  if (!spec.contains("sample_times") || !spec.at("sample_times").is_array() ||
      spec.at("sample_times").empty())
    throw ConfigError("config: integrator needs a non-empty \"sample_times\" array");
  for (const auto& t : spec.at("sample_times")) config.sample_times.push_back(t.get<double>());

  echo = json{{"method", method},
              {"rtol", config.rtol},
              {"atol", config.atol},
              {"h_init", config.h_init},
              {"h_max", config.h_max},
              {"negativity_floor", config.negativity_floor},
              {"sample_times", config.sample_times}};
  return config;
}

std::vector<double> profile_from_json(const json& spec, int truncation) {
  const std::string type = spec.value("type", std::string("ones"));
  if (type == "ones") return std::vector<double>(static_cast<std::size_t>(truncation) + 1, 1.0);
  if (type == "explicit") {
    if (!spec.contains("values")) throw ConfigError("config: explicit profile needs \"values\"");
    std::vector<double> profile;
    for (const auto& v : spec.at("values")) profile.push_back(v.get<double>());
    if (static_cast<int>(profile.size()) != truncation + 1)
      throw ConfigError("config: profile needs N+1 values");
    return profile;
  }
  throw ConfigError("config: unknown profile type \"" + type + "\"");
}

}  // namespace

BoundCertificate certificate_from_json(const json& spec) {
  if (!spec.is_object() || !spec.contains("name"))
    throw ConfigError("config: certificate must be an object with a \"name\"");
  const std::string name = spec.at("name").get<std::string>();
  BoundCertificate cert;
  if (name == "constant_kernel")
    cert = constant_kernel_certificate();
  else if (name == "edg_product")
    cert = edg_product_certificate(number_or(spec, "C0", 1.0));
  else if (name == "coagfrag_additive")
    cert = coagfrag_additive_certificate(number_or(spec, "C1", 1.0));
  else if (name == "bounded_exchange")
    cert = bounded_exchange_certificate(number_or(spec, "C_bar", 1.0), spec.value("k_bar", 1));
  else
    throw ConfigError("config: unknown certificate \"" + name + "\"");
  if (spec.contains("alpha")) cert.alpha = spec.at("alpha").get<double>();
  return cert;
}

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  RunConfig config;
  json echo;

  json kernel_echo;
  config.kernel = kernel_from_json(require(doc, "kernel"), base_dir, kernel_echo);
  echo["kernel"] = kernel_echo;

  const std::string variant = doc.value("variant", std::string("isolated"));
  if (variant == "isolated")
    config.variant = Variant::Isolated;
  else if (variant == "non_isolated" || variant == "non-isolated")
    config.variant = Variant::NonIsolated;
  else
    throw ConfigError("config: variant must be isolated or non_isolated");
  echo["variant"] = to_string(config.variant);

  if (!doc.contains("N") || !doc.at("N").is_number_integer())
    throw ConfigError("config: missing integer \"N\"");
  config.truncation = doc.at("N").get<int>();
  if (config.truncation < 1) throw ConfigError("config: N must be >= 1");
  echo["N"] = config.truncation;

  json initial_echo;
  config.initial = initial_from_json(require(doc, "initial"), config.truncation, initial_echo);
  echo["initial"] = initial_echo;

  if (doc.contains("bath")) {
    config.bath = doc.at("bath").get<double>();
    echo["bath"] = *config.bath;
  }
  if (config.variant == Variant::NonIsolated) {
    if (!config.bath && config.kernel.bath_concentration())
      config.bath = config.kernel.bath_concentration();
    if (!config.bath || !(*config.bath >= 0.0))
      throw ConfigError("config: non-isolated runs need bath >= 0");
    if (config.kernel.bath_concentration() &&
        *config.kernel.bath_concentration() != *config.bath)
      throw ConfigError("config: bath disagrees with the kernel's c00");
    echo["bath"] = *config.bath;
  }

  json integrator_echo;
  config.integrator = integrator_from_json(require(doc, "integrator"), integrator_echo);
  echo["integrator"] = integrator_echo;

  if (doc.contains("outputs")) {
    const auto& outputs = doc.at("outputs");
    config.series_csv = outputs.value("series_csv", config.series_csv);
    config.summary_json = outputs.value("summary_json", config.summary_json);
  }
  echo["outputs"] = json{{"series_csv", config.series_csv}, {"summary_json", config.summary_json}};

  json diag_echo = json::object();
  if (doc.contains("diagnostics")) {
    const auto& diagnostics = doc.at("diagnostics");
    if (diagnostics.contains("sigma")) {
      const auto& sigma = diagnostics.at("sigma");
      const std::string family = sigma.value("family", std::string("power"));
      if (family != "power") throw ConfigError("config: sigma family must be power");
      const double p = number_or(sigma, "p", 1.5);
      if (!(p > 1.0)) throw ConfigError("config: sigma exponent must be > 1");
      config.sigma = SigmaFunction::power(p);
      diag_echo["sigma"] = json{{"family", "power"}, {"p", p}};
    }
    if (diagnostics.contains("lyapunov_profile")) {
      config.lyapunov_profile =
          profile_from_json(diagnostics.at("lyapunov_profile"), config.truncation);
      diag_echo["lyapunov_profile"] = diagnostics.at("lyapunov_profile");
    }
    config.drift_threshold = number_or(diagnostics, "drift_threshold", config.drift_threshold);
  }
  diag_echo["drift_threshold"] = config.drift_threshold;
  echo["diagnostics"] = diag_echo;

  if (doc.contains("certificate")) {
    config.certificate_spec = doc.at("certificate");
    certificate_from_json(*config.certificate_spec);  // validate eagerly
    echo["certificate"] = doc.at("certificate");
  }
  if (doc.contains("equilibrium_profile")) {
    config.equilibrium_profile =
        profile_from_json(doc.at("equilibrium_profile"), config.truncation);
    echo["equilibrium_profile"] = doc.at("equilibrium_profile");
  }
  if (doc.contains("rho")) {
    config.rho = doc.at("rho").get<double>();
    echo["rho"] = *config.rho;
  }

  config.echo = std::move(echo);
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& failure) {
    throw ConfigError("config parse error in " + path.string() + ": " + failure.what());
  }
  try {
    return parse_run_config(doc, path.parent_path());
  } catch (const json::exception& failure) {
    throw ConfigError("config error in " + path.string() + ": " + failure.what());
  }
}

}  // namespace dged::cli
