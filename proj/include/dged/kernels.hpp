#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dged {

struct TableEntry;

// Rate coefficient family a(i,j;k): the rate constant of the reaction in
// which a chunk of size k detaches from an i-cluster and attaches to a
// j-cluster,
//
//     <i> + <j>  ->  <i-k> + <j+k>,      i >= 1,  j >= 0,  1 <= k <= i.
//
// Structural conditions carried by every well-formed kernel:
//   a(i,j;k) >= 0,
//   a(p,0;p)   = 0                      (the reaction <p>+<0> -> <0>+<p>
//                                        changes nothing),
//   a(k,j;k)   = a(j,k;j),   j,k >= 1   (coagulation symmetry),
//   a(i,0;k)   = a(i,0;i-k), 1<=k<=i-1  (fragmentation symmetry).
//
// Kernels are immutable after construction and safe to evaluate from many
// threads. Copies are cheap (shared immutable payload).
class RateKernel {
 public:
  enum class Form {
    ClosedForm,  // arbitrary callable over (i,j,k)
    Table,       // explicit entries, missing entries are 0
    DeltaUnit,   // k = 1 only (exchange-driven growth)
    CoagFrag,    // k = i (coagulation) plus j = 0 (binary fragmentation)
  };

  double evaluate(int i, int j, int k) const;  // throws std::out_of_range unless 1 <= k <= i

  Form form() const;
  const std::string& name() const;
  std::optional<int> max_exchange() const;          // upper bound on k, if any
  std::optional<double> bath_concentration() const; // c00 of a coag-frag mapping
  bool enforces_null() const;                       // a(p,0;p) forced to 0 at evaluation

  static RateKernel from_function(std::string name, std::function<double(int, int, int)> fn,
                                  std::optional<int> max_exchange = std::nullopt,
                                  bool enforce_null = true);

  // a(i,j;k) = 1 everywhere (null entries excepted).
  static RateKernel constant(double value = 1.0);

  // Unbounded-exchange example a(i,j;k) = (i-k+1)(j+k+1) / (1 + (i-k)k).
  static RateKernel unbounded_example();

 private:
  struct Impl;
  explicit RateKernel(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;

  friend RateKernel make_edg_kernel(std::string, std::function<double(int, int)>);
  friend RateKernel make_coagfrag_kernel(std::string, std::function<double(int, int)>,
                                         std::function<double(int, int)>, double);
  friend RateKernel make_table_kernel(std::string, const std::vector<TableEntry>&, bool);
};

// Exchange-driven growth embedding: a(i,j;k) = K(i,j) [k == 1].
RateKernel make_edg_kernel(std::string name, std::function<double(int, int)> K);

// Coagulation-fragmentation embedding for a bath concentration c00 > 0:
//   a(i,j;i) = a_coag(i,j)/2          for j >= 1,
//   a(i,0;k) = b_frag(i-k,k)/(2 c00)  for 1 <= k <= i-1,
// all other entries 0. Throws std::invalid_argument when c00 <= 0.
RateKernel make_coagfrag_kernel(std::string name, std::function<double(int, int)> a_coag,
                                std::function<double(int, int)> b_frag, double c00);

struct TableEntry {
  int i = 0;
  int j = 0;
  int k = 0;
  double value = 0.0;
};

// Explicit table; missing entries evaluate to 0. Entries with k > i or k < 1
// are rejected. enforce_null defaults to off for tables so that a bad
// a(p,0;p) row is surfaced by audit_structure instead of silently zeroed.
RateKernel make_table_kernel(std::string name, const std::vector<TableEntry>& entries,
                             bool enforce_null = false);

// CSV with header "i,j,k,value". Rows with k > i are rejected at load.
RateKernel load_table_kernel(const std::filesystem::path& csv_path);

// Fixed-parameter registry used by fixtures and the CLI:
//   constant, unbounded_example, edg_constant, edg_product,
//   coagfrag_constant, coagfrag_additive.
const std::vector<std::string>& builtin_kernel_names();
RateKernel make_builtin_kernel(const std::string& name);

// Growth-bound certificate. Certifies
//   sum_{k=1}^{i} k (i-k+1) q_{i,k}  <=  Q i                  (weight budget)
//   a(i,j;k)  <=  C (i-k+1)(j+k) q_{i,k},       j >= 1        (C-bound)
// and, when alpha is present (uniqueness regime, alpha in [0,1/2)),
//   a(i,j;k)  <=  C (i-k+1)^alpha (j^alpha + k^alpha) q_{i,k}, j >= 0.
struct BoundCertificate {
  double C = 1.0;  // >= 1
  double Q = 1.0;  // >= 1
  std::function<double(int, int)> q_weight;  // q_{i,k} >= 0 for 1 <= k <= i
  std::optional<double> alpha;
  std::string description;
};

BoundCertificate constant_kernel_certificate();                // C=2, Q=1, q=1/((i-k+1)k)
BoundCertificate edg_product_certificate(double C0 = 1.0);     // C=C0, Q=1, q=[k==1]
BoundCertificate coagfrag_additive_certificate(double C1 = 1.0);  // C=max(1,C1/2), Q=1, q=[k==i]
BoundCertificate bounded_exchange_certificate(double C_bar, int k_bar);  // C=k_bar*C_bar, Q=k_bar^2

struct AuditViolation {
  enum class Kind {
    Negative,      // a(i,j;k) < 0
    NullRule,      // a(p,0;p) != 0
    CoagSymmetry,  // a(k,j;k) != a(j,k;j)
    FragSymmetry,  // a(i,0;k) != a(i,0;i-k)
    QSum,          // weight budget exceeded at i
    CBound,        // growth bound exceeded at (i,j,k)
    AlphaBound,    // uniqueness-regime bound exceeded at (i,j,k)
  };
  Kind kind;
  int i = 0;
  int j = -1;  // -1 when not applicable
  int k = -1;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string describe() const;
};

struct AuditReport {
  int cap = 0;
  std::vector<AuditViolation> violations;
  bool passed() const { return violations.empty(); }
};

// Exhaustive check of nonnegativity, the null rule, and both symmetry
// relations for all indices <= cap. Violations are report entries, never
// exceptions.
AuditReport audit_structure(const RateKernel& kernel, int cap);

// Checks the weight budget for i <= cap and the C-bound for i,j <= cap
// (j >= 1); with alpha present also checks j = 0 entries. The existence
// regime deliberately leaves a(i,0;k) unconstrained.
AuditReport certify_bound(const RateKernel& kernel, const BoundCertificate& certificate, int cap);

}  // namespace dged
