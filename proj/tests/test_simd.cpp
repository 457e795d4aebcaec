#include <doctest.h>

#include <random>
#include <vector>

#include "rbq/simd/kernels.hpp"

using rbq::simd::cplx;

namespace {

std::vector<cplx> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(d(rng), d(rng));
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 17, 64, 1000, 1031};

}  // namespace

TEST_CASE("scalar reference kernels") {
  const auto& k = rbq::simd::scalar_kernels();
  std::vector<cplx> a{{1, 2}, {3, -1}}, b{{0, 1}, {2, 2}};
  k.cmul(a.data(), b.data(), 2);
  CHECK(a[0] == cplx(-2, 1));
  CHECK(a[1] == cplx(8, 4));
  CHECK(k.dot_conj(b.data(), b.data(), 2) == cplx(9, 0));
  CHECK(k.norm_sq(b.data(), 2) == 9.0);
  std::vector<double> r{1, 2, 3};
  k.radd_scalar(r.data(), 0.5, 3);
  CHECK(r[2] == 3.5);
}

TEST_CASE("active table agrees with the scalar reference") {
  const auto& ref = rbq::simd::scalar_kernels();
  const auto* avx = rbq::simd::avx2_kernels();
  const auto& act = rbq::simd::kernels();
  CHECK((act.name == ref.name || (avx != nullptr && act.name == avx->name)));
  std::vector<const rbq::simd::KernelTable*> tables{&act};
  if (avx != nullptr) tables.push_back(avx);
  std::mt19937_64 rng(5);
  for (const auto* t : tables) {
    CAPTURE(t->name);
    for (std::size_t n : kSizes) {
      CAPTURE(n);
      const auto a = random_vec(rng, n), b = random_vec(rng, n);
      const cplx c(0.3, -1.7);

      auto x = a, y = a;
      ref.cmul(x.data(), b.data(), n);
      t->cmul(y.data(), b.data(), n);
      CHECK(max_diff(x, y) <= 1e-14);

      x = a, y = a;
      ref.cmul_scalar(x.data(), c, n);
      t->cmul_scalar(y.data(), c, n);
      CHECK(max_diff(x, y) <= 1e-14);

      std::vector<cplx> u(n), v(n);
      ref.cmul_scalar_copy(u.data(), a.data(), c, n);
      t->cmul_scalar_copy(v.data(), a.data(), c, n);
      CHECK(max_diff(u, v) <= 1e-14);

      std::vector<double> ra(n), rb(n), rc(n);
      for (std::size_t i = 0; i < n; ++i) {
        ra[i] = a[i].real();
        rb[i] = b[i].imag();
      }
      rc = ra;
      ref.radd(ra.data(), rb.data(), n);
      t->radd(rc.data(), rb.data(), n);
      CHECK(ra == rc);
      ref.radd_scalar(ra.data(), 0.25, n);
      t->radd_scalar(rc.data(), 0.25, n);
      CHECK(ra == rc);

      const double scale = 1.0 + static_cast<double>(n);
      CHECK(std::abs(ref.norm_sq(a.data(), n) - t->norm_sq(a.data(), n)) <= 1e-13 * scale);
      CHECK(std::abs(ref.dot_conj(a.data(), b.data(), n) - t->dot_conj(a.data(), b.data(), n)) <= 1e-13 * scale);
      CHECK(std::abs(ref.dist_sq(a.data(), b.data(), n) - t->dist_sq(a.data(), b.data(), n)) <= 1e-13 * scale);
    }
  }
}

TEST_CASE("unaligned views") {
  const auto& ref = rbq::simd::scalar_kernels();
  const auto& act = rbq::simd::kernels();
  std::mt19937_64 rng(9);
  const auto a = random_vec(rng, 40), b = random_vec(rng, 40);
  for (std::size_t off = 0; off < 3; ++off) {
    auto x = a, y = a;
    ref.cmul(x.data() + off, b.data() + 1, 33);
    act.cmul(y.data() + off, b.data() + 1, 33);
    CHECK(max_diff(x, y) <= 1e-14);
  }
}
