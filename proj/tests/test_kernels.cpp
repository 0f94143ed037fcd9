#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "dged/kernels.hpp"

using namespace dged;
namespace fs = std::filesystem;

namespace {

fs::path write_temp_csv(const std::string& tag, const std::string& body) {
  const fs::path path = fs::temp_directory_path() / ("dged_kernel_" + tag + ".csv");
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("closed-form evaluation and the null rule") {
  const RateKernel constant = RateKernel::constant();
  CHECK(constant.evaluate(5, 3, 2) == 1.0);
  CHECK(constant.evaluate(4, 0, 4) == 0.0);  // a(p,0;p) = 0
  CHECK(constant.evaluate(1, 0, 1) == 0.0);
  CHECK(constant.evaluate(9, 0, 4) == 1.0);

  const RateKernel unbounded = RateKernel::unbounded_example();
  CHECK(unbounded.evaluate(3, 2, 1) == doctest::Approx(4.0).epsilon(1e-15));

  CHECK_THROWS_AS(constant.evaluate(3, 1, 4), std::out_of_range);  // k > i
  CHECK_THROWS_AS(constant.evaluate(3, 1, 0), std::out_of_range);  // k < 1
  CHECK_THROWS_AS(constant.evaluate(0, 1, 1), std::out_of_range);
  CHECK_THROWS_AS(constant.evaluate(3, -1, 1), std::out_of_range);
}

TEST_CASE("evaluation is pure") {
  const RateKernel kernel = RateKernel::unbounded_example();
  for (int i = 1; i <= 12; ++i)
    for (int k = 1; k <= i; ++k)
      for (int j = 0; j <= 12; ++j) {
        const double first = kernel.evaluate(i, j, k);
        const double second = kernel.evaluate(i, j, k);
        CHECK(std::memcmp(&first, &second, sizeof(double)) == 0);
      }
}

TEST_CASE("exchange-driven embedding") {
  const RateKernel edg = make_edg_kernel(
      "product", [](int i, int j) { return static_cast<double>(i) * j; });
  CHECK(edg.evaluate(2, 3, 1) == 6.0);
  CHECK(edg.evaluate(2, 3, 2) == 0.0);  // delta on k = 1
  CHECK(edg.max_exchange() == 1);
  CHECK(edg.form() == RateKernel::Form::DeltaUnit);

  CHECK(audit_structure(edg, 10).passed());
  CHECK(audit_structure(edg, 20).passed());
}

TEST_CASE("coagulation-fragmentation embedding") {
  const RateKernel pure_coag = make_coagfrag_kernel(
      "coag2", [](int, int) { return 2.0; }, [](int, int) { return 0.0; }, 1.0);
  CHECK(pure_coag.evaluate(3, 4, 3) == 1.0);  // a_coag/2 at k = i
  CHECK(pure_coag.evaluate(3, 4, 1) == 0.0);
  CHECK(pure_coag.bath_concentration() == 1.0);

  const RateKernel pure_frag = make_coagfrag_kernel(
      "frag1", [](int, int) { return 0.0; }, [](int, int) { return 1.0; }, 2.0);
  CHECK(pure_frag.evaluate(5, 0, 2) == doctest::Approx(0.25).epsilon(1e-15));

  CHECK_THROWS_AS(make_coagfrag_kernel(
                      "bad", [](int, int) { return 1.0; }, [](int, int) { return 1.0; }, 0.0),
                  std::invalid_argument);
}

TEST_CASE("structural audit") {
  CHECK(audit_structure(RateKernel::constant(), 20).passed());
  CHECK(audit_structure(RateKernel::unbounded_example(), 20).passed());

  // a(2,1;2) = 1 with the partner a(1,2;1) absent
  const RateKernel lopsided = make_table_kernel("lopsided", {{2, 1, 2, 1.0}});
  const AuditReport report = audit_structure(lopsided, 3);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].kind == AuditViolation::Kind::CoagSymmetry);
  CHECK(report.violations[0].i == 2);
  CHECK(report.violations[0].j == 1);
  CHECK(report.violations[0].k == 2);

  CHECK_THROWS_AS(audit_structure(lopsided, 1), std::invalid_argument);

  // a(4,0;1) = 1 with the partner a(4,0;3) absent
  const RateKernel uneven_frag = make_table_kernel("uneven_frag", {{4, 0, 1, 1.0}});
  const AuditReport frag_report = audit_structure(uneven_frag, 4);
  REQUIRE(frag_report.violations.size() == 1);
  CHECK(frag_report.violations[0].kind == AuditViolation::Kind::FragSymmetry);
  CHECK(frag_report.violations[0].i == 4);
  CHECK(frag_report.violations[0].k == 1);
}

TEST_CASE("every builtin kernel satisfies the structural invariants up to 50") {
  for (const auto& name : builtin_kernel_names()) {
    CAPTURE(name);
    const RateKernel kernel = make_builtin_kernel(name);
    const AuditReport report = audit_structure(kernel, 50);
    CHECK(report.passed());
  }
}

TEST_CASE("null-rule violations surface in table kernels") {
  const RateKernel bad = make_table_kernel("bad_null", {{3, 0, 3, 1.0}});
  const AuditReport report = audit_structure(bad, 4);
  REQUIRE_FALSE(report.passed());
  bool found = false;
  for (const auto& v : report.violations)
    if (v.kind == AuditViolation::Kind::NullRule && v.i == 3 && v.k == 3) found = true;
  CHECK(found);
}

TEST_CASE("certificates from the worked examples") {
  SUBCASE("constant kernel") {
    const AuditReport report =
        certify_bound(RateKernel::constant(), constant_kernel_certificate(), 30);
    CHECK(report.passed());
  }
  SUBCASE("edg product kernel") {
    const RateKernel edg = make_builtin_kernel("edg_product");
    const AuditReport report = certify_bound(edg, edg_product_certificate(1.0), 30);
    CHECK(report.passed());
  }
  SUBCASE("coag-frag additive kernel") {
    const RateKernel kernel = make_builtin_kernel("coagfrag_additive");
    const AuditReport report = certify_bound(kernel, coagfrag_additive_certificate(1.0), 30);
    CHECK(report.passed());
  }
  SUBCASE("oversized weights blow the budget") {
    BoundCertificate cert = constant_kernel_certificate();
    cert.q_weight = [](int i, int k) { return 2.0 / (static_cast<double>(i - k + 1) * k); };
    const AuditReport report = certify_bound(RateKernel::constant(), cert, 10);
    REQUIRE_FALSE(report.passed());
    for (const auto& v : report.violations) CHECK(v.kind == AuditViolation::Kind::QSum);
    CHECK(report.violations.front().i == 1);
  }
  SUBCASE("alpha variant rejects the constant kernel's existence-regime weights") {
    BoundCertificate cert = constant_kernel_certificate();
    cert.alpha = 0.0;
    const AuditReport report = certify_bound(RateKernel::constant(), cert, 30);
    REQUIRE_FALSE(report.passed());
    CHECK(report.violations.front().kind == AuditViolation::Kind::AlphaBound);
    CHECK(report.violations.front().i == 4);  // first index where (i-k+1)k > 4
  }
}

TEST_CASE("bounded exchange certificate covers kernels below C_bar * i * j") {
  const int k_bar = 3;
  const RateKernel capped = RateKernel::from_function(
      "capped_product",
      [k_bar](int i, int j, int k) {
        return k <= k_bar ? static_cast<double>(i) * j : 0.0;
      },
      k_bar);
  const AuditReport report = certify_bound(capped, bounded_exchange_certificate(1.0, k_bar), 30);
  CHECK(report.passed());

  SUBCASE("arbitrary bounded kernels under the product ceiling") {
    // pure pseudo-random fraction of the ceiling, keyed on the index triple
    auto fraction = [](int i, int j, int k) {
      std::uint64_t h = 0x9e3779b97f4a7c15ull;
      for (int v : {i, j, k}) {
        h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h *= 0xff51afd7ed558ccdull;
      }
      return static_cast<double>(h % 1000) / 1000.0;
    };
    for (int kb : {1, 2, 4}) {
      for (double c_bar : {0.5, 2.0}) {
        CAPTURE(kb);
        CAPTURE(c_bar);
        const RateKernel kernel = RateKernel::from_function(
            "hashed",
            [=](int i, int j, int k) {
              return k <= kb ? c_bar * i * j * fraction(i, j, k) : 0.0;
            },
            kb);
        CHECK(certify_bound(kernel, bounded_exchange_certificate(c_bar, kb), 30).passed());
      }
    }
  }
}

TEST_CASE("table construction rejects bad entries") {
  CHECK_THROWS_AS(make_table_kernel("dup", {{2, 1, 1, 1.0}, {2, 1, 1, 2.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_table_kernel("domain", {{2, 1, 3, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_table_kernel("nan", {{2, 1, 1, std::nan("")}}), std::invalid_argument);
}

TEST_CASE("table kernels load from csv") {
  const fs::path good = write_temp_csv("good",
                                       "i,j,k,value\n"
                                       "2,1,1,0.5\n"
                                       "1,2,1,0.5\n"
                                       "5,0,2,1.25\n");
  const RateKernel kernel = load_table_kernel(good);
  CHECK(kernel.evaluate(2, 1, 1) == 0.5);
  CHECK(kernel.evaluate(5, 0, 2) == 1.25);
  CHECK(kernel.evaluate(4, 4, 2) == 0.0);  // missing entries are 0
  std::remove(good.string().c_str());

  const fs::path bad_row = write_temp_csv("badrow",
                                          "i,j,k,value\n"
                                          "2,1,3,1.0\n");  // k > i
  CHECK_THROWS(load_table_kernel(bad_row));
  std::remove(bad_row.string().c_str());

  const fs::path bad_header = write_temp_csv("badheader", "a,b,c,d\n1,1,1,1\n");
  CHECK_THROWS(load_table_kernel(bad_header));
  std::remove(bad_header.string().c_str());
}
