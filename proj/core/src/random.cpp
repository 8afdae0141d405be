#include "pvdecay/random.hpp"

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/version.hpp>

#include <string>

namespace pvdecay {

std::string_view rng_description() {
  static const std::string text =
      std::string("xoshiro256**-1.0/splitmix64; boost.random ") + BOOST_LIB_VERSION;
  return text;
}

double draw_normal(Xoshiro256& rng, double mean, double sd) {
  if (sd == 0.0) return mean;
  boost::random::normal_distribution<double> dist(mean, sd);
  return dist(rng);
}

std::int64_t draw_poisson(Xoshiro256& rng, double mean) {
  if (mean <= 0.0) return 0;
  boost::random::poisson_distribution<std::int64_t, double> dist(mean);
  return dist(rng);
}

std::int64_t draw_binomial(Xoshiro256& rng, std::int64_t trials, double p) {
  if (trials <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  boost::random::binomial_distribution<std::int64_t, double> dist(trials, p);
  return dist(rng);
}

}  // namespace pvdecay
