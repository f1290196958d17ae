#include "ktv/coefficient.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace ktv;

namespace {

std::vector<KirchhoffCoefficient> families()
{
  return {KirchhoffCoefficient::constant(2.5), KirchhoffCoefficient::affine(), KirchhoffCoefficient::power(2.0),
          KirchhoffCoefficient::power(3.5), KirchhoffCoefficient::tabulated({{0.0, 1.0}, {1.0, 2.0}, {4.0, 3.0}})};
}

} // namespace

TEST(Coefficient, ClosedFormValues)
{
  EXPECT_DOUBLE_EQ(KirchhoffCoefficient::constant(3.0)(7.0), 3.0);
  EXPECT_DOUBLE_EQ(KirchhoffCoefficient::affine()(2.0), 3.0);
  EXPECT_DOUBLE_EQ(KirchhoffCoefficient::power(2.0)(2.0), 9.0);
  EXPECT_DOUBLE_EQ(KirchhoffCoefficient::constant(3.0).antiderivative(2.0), 6.0);
  EXPECT_DOUBLE_EQ(KirchhoffCoefficient::affine().antiderivative(2.0), 4.0);
  EXPECT_DOUBLE_EQ(KirchhoffCoefficient::power(2.0).antiderivative(2.0), 26.0 / 3.0);
}

TEST(Coefficient, PowerRequiresExponentAboveOne)
{
  EXPECT_THROW(KirchhoffCoefficient::power(1.0), std::invalid_argument);
  EXPECT_THROW(KirchhoffCoefficient::power(0.5), std::invalid_argument);
  EXPECT_THROW(KirchhoffCoefficient::constant(0.0), std::invalid_argument);
}

TEST(Coefficient, TabulatedInterpolatesAndClamps)
{
  auto m = KirchhoffCoefficient::tabulated({{0.0, 1.0}, {1.0, 2.0}, {4.0, 3.0}});
  EXPECT_DOUBLE_EQ(m(0.5), 1.5);
  EXPECT_DOUBLE_EQ(m(2.5), 2.5);
  EXPECT_DOUBLE_EQ(m(100.0), 3.0);
  EXPECT_DOUBLE_EQ(m.antiderivative(1.0), 1.5);
  EXPECT_DOUBLE_EQ(m.antiderivative(4.0), 1.5 + 7.5);
  EXPECT_DOUBLE_EQ(m.antiderivative(5.0), 9.0 + 3.0);
}

TEST(Coefficient, TabulatedValidation)
{
  EXPECT_THROW(KirchhoffCoefficient::tabulated({}), std::invalid_argument);
  EXPECT_THROW(KirchhoffCoefficient::tabulated({{0.5, 1.0}}), std::invalid_argument);
  EXPECT_THROW(KirchhoffCoefficient::tabulated({{0.0, 0.0}}), std::invalid_argument);
  EXPECT_THROW(KirchhoffCoefficient::tabulated({{0.0, 2.0}, {1.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(KirchhoffCoefficient::tabulated({{0.0, 1.0}, {0.0, 2.0}}), std::invalid_argument);
}

TEST(CoefficientProperty, MonotoneAndPositive)
{
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(0.0, 20.0);
  for (auto const &m : families()) {
    EXPECT_GT(m.at_zero(), 0.0);
    for (int i = 0; i < 1000; ++i) {
      double a = dist(rng), b = dist(rng);
      if (a > b) std::swap(a, b);
      EXPECT_LE(m(a), m(b));
      EXPECT_GE(m(a), m.at_zero());
    }
  }
}

TEST(CoefficientProperty, AntiderivativeDifferentiatesToCoefficient)
{
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(0.01, 5.0);
  double const eps = 1e-5;
  for (auto const &m : families()) {
    EXPECT_EQ(m.antiderivative(0.0), 0.0);
    for (int i = 0; i < 200; ++i) {
      double const s = dist(rng);
      if (m.family() == CoefficientFamily::tabulated && (std::abs(s - 1.0) < 2 * eps || std::abs(s - 4.0) < 2 * eps))
        continue;
      double const d = (m.antiderivative(s + eps) - m.antiderivative(s - eps)) / (2 * eps);
      EXPECT_NEAR(d, m(s), 1e-6 * std::max(1.0, m(s)));
    }
  }
}

TEST(Coefficient, ParseAndPrintFamilies)
{
  for (auto f : {CoefficientFamily::constant, CoefficientFamily::affine, CoefficientFamily::power,
                 CoefficientFamily::tabulated})
    EXPECT_EQ(parse_family(to_string(f)), f);
  EXPECT_THROW(parse_family("cubic"), std::invalid_argument);
}

TEST(Coefficient, MuAttachment)
{
  auto m = KirchhoffCoefficient::affine();
  EXPECT_FALSE(m.mu());
  EXPECT_EQ(*m.with_mu(0.25).mu(), 0.25);
  EXPECT_THROW(m.with_mu(1.5), std::invalid_argument);
  EXPECT_FALSE(m == m.with_mu(0.25));
}
