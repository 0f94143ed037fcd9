#include "dged/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "dged/kahan.hpp"

namespace dged {

namespace {

constexpr int kIndexBits = 21;  // packed table key, indices < 2^21

std::uint64_t pack_key(int i, int j, int k) {
  return (static_cast<std::uint64_t>(i) << (2 * kIndexBits)) |
         (static_cast<std::uint64_t>(j) << kIndexBits) | static_cast<std::uint64_t>(k);
}

// Slack absorbing rounding in certificate arithmetic; the bounds themselves
// hold with wide margins or fail by integer factors.
constexpr double kCertSlack = 1e-12;

}  // namespace

struct RateKernel::Impl {
  Form form = Form::ClosedForm;
  std::string name;
  std::function<double(int, int, int)> fn;  // unset for Table
  std::unordered_map<std::uint64_t, double> table;
  std::optional<int> max_exchange;
  std::optional<double> bath;
  bool enforce_null = true;
};

RateKernel::RateKernel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

double RateKernel::evaluate(int i, int j, int k) const {
  if (i < 1 || j < 0 || k < 1 || k > i)
    throw std::out_of_range("rate kernel: need i >= 1, j >= 0, 1 <= k <= i (got i=" +
                            std::to_string(i) + " j=" + std::to_string(j) +
                            " k=" + std::to_string(k) + ")");
  if (impl_->enforce_null && j == 0 && k == i) return 0.0;
  if (impl_->max_exchange && k > *impl_->max_exchange) return 0.0;
  if (impl_->form == Form::Table) {
    const auto it = impl_->table.find(pack_key(i, j, k));
    return it == impl_->table.end() ? 0.0 : it->second;
  }
  return impl_->fn(i, j, k);
}

RateKernel::Form RateKernel::form() const { return impl_->form; }
const std::string& RateKernel::name() const { return impl_->name; }
std::optional<int> RateKernel::max_exchange() const { return impl_->max_exchange; }
std::optional<double> RateKernel::bath_concentration() const { return impl_->bath; }
bool RateKernel::enforces_null() const { return impl_->enforce_null; }

RateKernel RateKernel::from_function(std::string name, std::function<double(int, int, int)> fn,
                                     std::optional<int> max_exchange, bool enforce_null) {
  if (max_exchange && *max_exchange < 1)
    throw std::invalid_argument("rate kernel: max_exchange must be >= 1");
  auto impl = std::make_shared<Impl>();
  impl->form = Form::ClosedForm;
  impl->name = std::move(name);
  impl->fn = std::move(fn);
  impl->max_exchange = max_exchange;
  impl->enforce_null = enforce_null;
  return RateKernel(std::move(impl));
}

RateKernel RateKernel::constant(double value) {
  if (!(value >= 0.0)) throw std::invalid_argument("constant kernel: value must be >= 0");
  return from_function("constant", [value](int, int, int) { return value; });
}

RateKernel RateKernel::unbounded_example() {
  return from_function("unbounded_example", [](int i, int j, int k) {
    const double num = static_cast<double>(i - k + 1) * static_cast<double>(j + k + 1);
    const double den = 1.0 + static_cast<double>(i - k) * static_cast<double>(k);
    return num / den;
  });
}

RateKernel make_edg_kernel(std::string name, std::function<double(int, int)> K) {
  auto impl = std::make_shared<RateKernel::Impl>();
  impl->form = RateKernel::Form::DeltaUnit;
  impl->name = std::move(name);
  impl->fn = [K = std::move(K)](int i, int j, int k) { return k == 1 ? K(i, j) : 0.0; };
  impl->max_exchange = 1;
  return RateKernel(std::move(impl));
}

RateKernel make_coagfrag_kernel(std::string name, std::function<double(int, int)> a_coag,
                                std::function<double(int, int)> b_frag, double c00) {
  if (!(c00 > 0.0)) throw std::invalid_argument("coag-frag kernel: c00 must be > 0");
  auto impl = std::make_shared<RateKernel::Impl>();
  impl->form = RateKernel::Form::CoagFrag;
  impl->name = std::move(name);
  impl->bath = c00;
  impl->fn = [a_coag = std::move(a_coag), b_frag = std::move(b_frag), c00](int i, int j,
                                                                           int k) -> double {
    if (k == i && j >= 1) return 0.5 * a_coag(i, j);
    if (j == 0 && k <= i - 1) return 0.5 * b_frag(i - k, k) / c00;
    return 0.0;
  };
  return RateKernel(std::move(impl));
}

RateKernel make_table_kernel(std::string name, const std::vector<TableEntry>& entries,
                             bool enforce_null) {
  auto impl = std::make_shared<RateKernel::Impl>();
  impl->form = RateKernel::Form::Table;
  impl->name = std::move(name);
  impl->enforce_null = enforce_null;
  for (const auto& e : entries) {
    if (e.i < 1 || e.j < 0 || e.k < 1 || e.k > e.i)
      throw std::invalid_argument("table kernel: entry (" + std::to_string(e.i) + "," +
                                  std::to_string(e.j) + "," + std::to_string(e.k) +
                                  ") outside the domain 1 <= k <= i, j >= 0");
    if (e.i >= (1 << kIndexBits) || e.j >= (1 << kIndexBits))
      throw std::invalid_argument("table kernel: index too large");
    if (!std::isfinite(e.value)) throw std::invalid_argument("table kernel: non-finite value");
    if (!impl->table.emplace(pack_key(e.i, e.j, e.k), e.value).second)
      throw std::invalid_argument("table kernel: duplicate entry (" + std::to_string(e.i) + "," +
                                  std::to_string(e.j) + "," + std::to_string(e.k) + ")");
  }
  return RateKernel(std::move(impl));
}

RateKernel load_table_kernel(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open kernel table: " + csv_path.string());

  auto strip = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };

  std::string line;
  if (!std::getline(in, line) || strip(line) != "i,j,k,value")
    throw std::runtime_error("kernel table " + csv_path.string() +
                             ": expected header \"i,j,k,value\"");

  std::vector<TableEntry> entries;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = strip(line);
    if (row.empty()) continue;
    std::stringstream ss(row);
    std::string field;
    TableEntry e;
    int column = 0;
    while (std::getline(ss, field, ',')) {
      field = strip(field);
      const char* begin = field.data();
      const char* end = begin + field.size();
      std::from_chars_result rc{};
      switch (column) {
        case 0: rc = std::from_chars(begin, end, e.i); break;
        case 1: rc = std::from_chars(begin, end, e.j); break;
        case 2: rc = std::from_chars(begin, end, e.k); break;
        case 3: rc = std::from_chars(begin, end, e.value); break;
        default: rc = {begin, std::errc::invalid_argument}; break;
      }
      if (rc.ec != std::errc() || rc.ptr != end)
        throw std::runtime_error("kernel table " + csv_path.string() + ": bad field at line " +
                                 std::to_string(line_no));
      ++column;
    }
    if (column != 4)
      throw std::runtime_error("kernel table " + csv_path.string() + ": expected 4 columns at line " +
                               std::to_string(line_no));
    if (e.k > e.i || e.k < 1)
      throw std::runtime_error("kernel table " + csv_path.string() + ": row with k outside [1,i] at line " +
                               std::to_string(line_no));
    entries.push_back(e);
  }
  return make_table_kernel(csv_path.stem().string(), entries);
}

const std::vector<std::string>& builtin_kernel_names() {
  static const std::vector<std::string> names = {
      "constant",          "unbounded_example", "edg_constant",
      "edg_product",       "coagfrag_constant", "coagfrag_additive",
  };
  return names;
}

RateKernel make_builtin_kernel(const std::string& name) {
  if (name == "constant") return RateKernel::constant();
  if (name == "unbounded_example") return RateKernel::unbounded_example();
  if (name == "edg_constant")
    return make_edg_kernel("edg_constant", [](int, int) { return 1.0; });
  if (name == "edg_product")
    return make_edg_kernel("edg_product",
                           [](int i, int j) { return static_cast<double>(i) * j; });
  if (name == "coagfrag_constant")
    return make_coagfrag_kernel(
        "coagfrag_constant", [](int, int) { return 2.0; }, [](int, int) { return 0.0; }, 1.0);
  if (name == "coagfrag_additive")
    return make_coagfrag_kernel(
        "coagfrag_additive", [](int i, int j) { return static_cast<double>(i + j); },
        [](int, int) { return 1.0; }, 1.0);
  throw std::invalid_argument("unknown builtin kernel: " + name);
}

BoundCertificate constant_kernel_certificate() {
  BoundCertificate cert;
  cert.C = 2.0;
  cert.Q = 1.0;
  cert.q_weight = [](int i, int k) { return 1.0 / (static_cast<double>(i - k + 1) * k); };
  cert.description = "C=2, Q=1, q_{i,k}=1/((i-k+1)k)";
  return cert;
}

BoundCertificate edg_product_certificate(double C0) {
  BoundCertificate cert;
  cert.C = C0;
  cert.Q = 1.0;
  cert.q_weight = [](int, int k) { return k == 1 ? 1.0 : 0.0; };
  cert.description = "C=C0, Q=1, q_{i,k}=[k==1]";
  return cert;
}

BoundCertificate coagfrag_additive_certificate(double C1) {
  BoundCertificate cert;
  cert.C = std::max(1.0, 0.5 * C1);
  cert.Q = 1.0;
  cert.q_weight = [](int i, int k) { return k == i ? 1.0 : 0.0; };
  cert.description = "C=max(1,C1/2), Q=1, q_{i,k}=[k==i]";
  return cert;
}

BoundCertificate bounded_exchange_certificate(double C_bar, int k_bar) {
  if (k_bar < 1) throw std::invalid_argument("bounded exchange certificate: k_bar >= 1");
  BoundCertificate cert;
  cert.C = k_bar * C_bar;
  cert.Q = static_cast<double>(k_bar) * k_bar;
  cert.q_weight = [k_bar](int, int k) { return k <= k_bar ? 1.0 : 0.0; };
  cert.description = "C=k_bar*C_bar, Q=k_bar^2, q_{i,k}=[k<=k_bar]";
  return cert;
}

std::string AuditViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Negative:
      os << "negative coefficient a(" << i << "," << j << ";" << k << ") = " << lhs;
      break;
    case Kind::NullRule:
      os << "null rule: a(" << i << ",0;" << i << ") = " << lhs << " (must be 0)";
      break;
    case Kind::CoagSymmetry:
      os << "coagulation symmetry: a(" << i << "," << j << ";" << k << ") = " << lhs
         << " but a(" << j << "," << i << ";" << j << ") = " << rhs;
      break;
    case Kind::FragSymmetry:
      os << "fragmentation symmetry: a(" << i << ",0;" << k << ") = " << lhs << " but a(" << i
         << ",0;" << i - k << ") = " << rhs;
      break;
    case Kind::QSum:
      os << "weight budget: sum_k k(i-k+1) q_{i,k} = " << lhs << " > Q*i = " << rhs << " at i=" << i;
      break;
    case Kind::CBound:
      os << "growth bound: a(" << i << "," << j << ";" << k << ") = " << lhs << " > " << rhs;
      break;
    case Kind::AlphaBound:
      os << "uniqueness-regime bound: a(" << i << "," << j << ";" << k << ") = " << lhs << " > "
         << rhs;
      break;
  }
  return os.str();
}

AuditReport audit_structure(const RateKernel& kernel, int cap) {
  if (cap < 2) throw std::invalid_argument("audit_structure: cap must be >= 2");
  AuditReport report;
  report.cap = cap;

  for (int i = 1; i <= cap; ++i)
    for (int k = 1; k <= i; ++k)
      for (int j = 0; j <= cap; ++j) {
        const double v = kernel.evaluate(i, j, k);
        if (!(v >= 0.0))
          report.violations.push_back(
              {AuditViolation::Kind::Negative, i, j, k, v, 0.0});
      }

  for (int p = 1; p <= cap; ++p) {
    const double v = kernel.evaluate(p, 0, p);
    if (v != 0.0)
      report.violations.push_back({AuditViolation::Kind::NullRule, p, 0, p, v, 0.0});
  }

  // The symmetry relations pair two descriptions of the same reaction. When
  // the kernel declares a bounded exchange size, pairs whose partner chunk
  // exceeds that bound describe a move outside the model and are skipped.
  const int chunk_cap = kernel.max_exchange().value_or(cap);

  for (int k = 2; k <= std::min(cap, chunk_cap); ++k)
    for (int j = 1; j < k; ++j) {
      if (j > chunk_cap) continue;
      const double lhs = kernel.evaluate(k, j, k);
      const double rhs = kernel.evaluate(j, k, j);
      if (lhs != rhs)
        report.violations.push_back({AuditViolation::Kind::CoagSymmetry, k, j, k, lhs, rhs});
    }

  for (int i = 2; i <= cap; ++i)
    for (int k = 1; 2 * k < i; ++k) {  // partner i-k > k, each pair checked once
      if (k > chunk_cap || i - k > chunk_cap) continue;
      const double lhs = kernel.evaluate(i, 0, k);
      const double rhs = kernel.evaluate(i, 0, i - k);
      if (lhs != rhs)
        report.violations.push_back({AuditViolation::Kind::FragSymmetry, i, 0, k, lhs, rhs});
    }

  return report;
}

AuditReport certify_bound(const RateKernel& kernel, const BoundCertificate& certificate, int cap) {
  if (cap < 2) throw std::invalid_argument("certify_bound: cap must be >= 2");
  if (!certificate.q_weight) throw std::invalid_argument("certify_bound: certificate lacks q weights");
  AuditReport report;
  report.cap = cap;

  for (int i = 1; i <= cap; ++i) {
    detail::KahanSum budget;
    for (int k = 1; k <= i; ++k) {
      const double q = certificate.q_weight(i, k);
      budget.add(static_cast<double>(k) * (i - k + 1) * q);
    }
    const double limit = certificate.Q * i;
    if (budget.value() > limit * (1.0 + kCertSlack))
      report.violations.push_back(
          {AuditViolation::Kind::QSum, i, -1, -1, budget.value(), limit});
  }

  for (int i = 1; i <= cap; ++i)
    for (int k = 1; k <= i; ++k) {
      const double q = certificate.q_weight(i, k);
      for (int j = 1; j <= cap; ++j) {
        const double a = kernel.evaluate(i, j, k);
        const double bound =
            certificate.C * static_cast<double>(i - k + 1) * static_cast<double>(j + k) * q;
        if (a > bound * (1.0 + kCertSlack))
          report.violations.push_back({AuditViolation::Kind::CBound, i, j, k, a, bound});
      }
    }

  if (certificate.alpha) {
    const double alpha = *certificate.alpha;
    if (!(alpha >= 0.0 && alpha < 0.5))
      throw std::invalid_argument("certify_bound: alpha must lie in [0, 1/2)");
    for (int i = 1; i <= cap; ++i)
      for (int k = 1; k <= i; ++k) {
        const double q = certificate.q_weight(i, k);
        for (int j = 0; j <= cap; ++j) {
          const double a = kernel.evaluate(i, j, k);
          const double jpow = j == 0 && alpha == 0.0 ? 1.0 : std::pow(j, alpha);
          const double bound =
              certificate.C * std::pow(i - k + 1, alpha) * (jpow + std::pow(k, alpha)) * q;
          if (a > bound * (1.0 + kCertSlack))
            report.violations.push_back({AuditViolation::Kind::AlphaBound, i, j, k, a, bound});
        }
      }
  }

  return report;
}

}  // namespace dged
