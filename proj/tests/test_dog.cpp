#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bcosfire/dog.hpp"
#include "bcosfire/error.hpp"
#include "oracles.hpp"

using namespace bcosfire;

namespace {

double weight_sum(const DogKernel& k) {
  double s = 0.0;
  for (double w : k.weights()) s += w;
  return s;
}

}  // namespace

TEST(Dog, RadiusAndZeroSum) {
  const DogKernel k = make_dog(1.0, Polarity::CenterOn);
  EXPECT_EQ(k.radius(), 3);
  EXPECT_EQ(k.side(), 7);
  EXPECT_EQ(k.weights().size(), 49u);
  EXPECT_LE(std::abs(weight_sum(k)), 1e-6);
  EXPECT_EQ(make_dog(2.9, Polarity::CenterOn).radius(), 9);
  EXPECT_THROW(make_dog(0.0, Polarity::CenterOn), ParameterError);
  EXPECT_THROW(make_dog(-1.0, Polarity::CenterOff), ParameterError);
}

TEST(Dog, PolarityIsNegation) {
  for (double sigma : {0.7, 1.4, 2.9, 4.6}) {
    const DogKernel on = make_dog(sigma, Polarity::CenterOn);
    const DogKernel off = make_dog(sigma, Polarity::CenterOff);
    ASSERT_EQ(on.weights().size(), off.weights().size());
    for (std::size_t i = 0; i < on.weights().size(); ++i) {
      EXPECT_EQ(off.weights()[i], -on.weights()[i]);
    }
  }
  // Inner Gaussian dominates at the origin.
  EXPECT_LT(make_dog(2.9, Polarity::CenterOff).weight(0, 0), 0.0);
  EXPECT_GT(make_dog(2.9, Polarity::CenterOn).weight(0, 0), 0.0);
}

TEST(Dog, EightFoldSymmetryIsExact) {
  const DogKernel k = make_dog(2.3, Polarity::CenterOn);
  const int r = k.radius();
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) {
      EXPECT_EQ(k.weight(x, y), k.weight(-x, y));
      EXPECT_EQ(k.weight(x, y), k.weight(x, -y));
      EXPECT_EQ(k.weight(x, y), k.weight(y, x));
    }
  }
}

TEST(Dog, WeightsMatchFormula) {
  for (double sigma : {0.8, 2.4, 5.5}) {
    int r = 0;
    const auto ref = oracle::dog_weights(sigma, true, r);
    const DogKernel k = make_dog(sigma, Polarity::CenterOn);
    ASSERT_EQ(k.radius(), r);
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(k.weights()[i], ref[i], 1e-12);
  }
}

TEST(Dog, ResponseMatchesDirectCorrelation) {
  std::mt19937_64 rng(42);
  for (double sigma : {0.6, 1.4, 2.4}) {
    for (Polarity pol : {Polarity::CenterOn, Polarity::CenterOff}) {
      const GrayImage img = oracle::random_image(23, 19, rng);
      const GrayImage got = dog_response(img, make_dog(sigma, pol));
      const GrayImage ref = oracle::dog_response(img, sigma, pol == Polarity::CenterOn);
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_NEAR(got.pixels()[i], ref.pixels()[i], 1e-6);
      }
    }
  }
}

TEST(Dog, UniformImageGivesZero) {
  for (double c : {0.0, 0.3, 0.5, 1.0}) {
    const GrayImage r = dog_response(GrayImage(20, 20, c), make_dog(1.7, Polarity::CenterOn));
    for (double v : r.pixels()) EXPECT_EQ(v, 0.0);
  }
}

TEST(Dog, ImpulseResponseIsCenterWeight) {
  GrayImage img(21, 21);
  img.at(10, 10) = 1.0;
  const DogKernel k = make_dog(1.5, Polarity::CenterOn);
  const GrayImage r = dog_response(img, k);
  EXPECT_NEAR(r.at(10, 10), k.weight(0, 0), 1e-15);
  EXPECT_GT(r.at(10, 10), 0.0);
  // A neighbour inside the positive core.
  EXPECT_NEAR(r.at(11, 10), std::max(0.0, k.weight(1, 0)), 1e-15);
}

TEST(Dog, DarkBarPeaksOnCenterline) {
  const double sigma = 2.0;
  GrayImage img(64, 64, 1.0);
  for (int y = 0; y < 64; ++y) {
    for (int x = 30; x <= 33; ++x) img.at(x, y) = 0.0;  // width 4 = 2 sigma
  }
  const GrayImage ref = oracle::dog_response(img, sigma, false);
  const GrayImage got = dog_response(img, make_dog(sigma, Polarity::CenterOff));
  for (int y = 0; y < 64; ++y) {
    int arg = 0;
    for (int x = 1; x < 64; ++x) {
      if (got.at(x, y) > got.at(arg, y)) arg = x;
    }
    // The centerline of a 4-pixel bar lies between columns 31 and 32.
    EXPECT_TRUE(arg == 31 || arg == 32) << "row " << y << " argmax " << arg;
    EXPECT_NEAR(got.at(31, y), ref.at(31, y), 1e-6);
    EXPECT_NEAR(got.at(31, y), got.at(32, y), 1e-12);
  }
}

TEST(Dog, KernelLargerThanImageIsSizeError) {
  EXPECT_THROW(dog_response(GrayImage(10, 40), make_dog(2.0, Polarity::CenterOn)), SizeError);
  EXPECT_NO_THROW(dog_response(GrayImage(13, 13), make_dog(2.0, Polarity::CenterOn)));
}

TEST(Dog, ResponseIsNonnegativeAndShiftInvariant) {
  std::mt19937_64 rng(5);
  const DogKernel k = make_dog(1.9, Polarity::CenterOff);
  for (int trial = 0; trial < 5; ++trial) {
    GrayImage img = oracle::random_image(30, 26, rng, 0.0, 0.6);
    const GrayImage a = dog_response(img, k);
    for (double& v : img.pixels()) v += 0.37;
    const GrayImage b = dog_response(img, k);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_GE(a.pixels()[i], 0.0);
      EXPECT_NEAR(a.pixels()[i], b.pixels()[i], 1e-9);
    }
  }
}

TEST(Dog, Rot90CommutesExactly) {
  std::mt19937_64 rng(9);
  const DogKernel k = make_dog(2.2, Polarity::CenterOn);
  const GrayImage img = oracle::random_image(31, 24, rng);
  EXPECT_EQ(dog_response(rot90(img), k), rot90(dog_response(img, k)));
}

TEST(Dog, ReflectIndex) {
  EXPECT_EQ(reflect_index(-1, 5), 1);
  EXPECT_EQ(reflect_index(-2, 5), 2);
  EXPECT_EQ(reflect_index(5, 5), 3);
  EXPECT_EQ(reflect_index(6, 5), 2);
  EXPECT_EQ(reflect_index(0, 1), 0);
  EXPECT_EQ(parse_polarity("center-off"), Polarity::CenterOff);
  EXPECT_THROW(parse_polarity("sideways"), ParameterError);
}
