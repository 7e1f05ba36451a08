#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "ghelab/error.hpp"
#include "ghelab/random.hpp"

namespace ghelab {

enum class ReturnKind { log_return, difference };

/// The three stochastic variables built from a return series:
/// the (log-)price level, cumulative absolute returns, cumulative squared returns.
enum class VariableKind { price, cum_abs_return, cum_sq_return };

constexpr std::string_view to_string(ReturnKind k) {
  return k == ReturnKind::log_return ? "log_return" : "difference";
}

constexpr std::string_view to_string(VariableKind k) {
  switch (k) {
    case VariableKind::price: return "price";
    case VariableKind::cum_abs_return: return "cum_abs_return";
    case VariableKind::cum_sq_return: return "cum_sq_return";
  }
  return "price";
}

struct ReturnSeries {
  std::vector<double> values;
  ReturnKind kind = ReturnKind::difference;
  bool demeaned = false;

  std::size_t size() const noexcept { return values.size(); }
};

struct SeriesPath {
  std::vector<double> values;
  VariableKind variable_kind = VariableKind::price;

  std::size_t size() const noexcept { return values.size(); }
};

inline ReturnSeries make_returns(std::span<const double> prices, ReturnKind kind) {
  if (prices.size() < 2) {
    throw Error(ErrorCode::TooShort, "need at least two prices to form a return");
  }
  ReturnSeries out;
  out.kind = kind;
  out.values.reserve(prices.size() - 1);
  if (kind == ReturnKind::log_return) {
    for (std::size_t i = 0; i < prices.size(); ++i) {
      if (!(prices[i] > 0.0)) {
        throw Error(ErrorCode::NonPositivePrice,
                    "price at index " + std::to_string(i) + " is not positive");
      }
    }
    for (std::size_t i = 1; i < prices.size(); ++i) {
      out.values.push_back(std::log(prices[i]) - std::log(prices[i - 1]));
    }
  } else {
    for (std::size_t i = 1; i < prices.size(); ++i) {
      out.values.push_back(prices[i] - prices[i - 1]);
    }
  }
  return out;
}

inline double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline ReturnSeries demean(const ReturnSeries& r) {
  if (r.values.empty()) {
    throw Error(ErrorCode::TooShort, "cannot demean an empty series");
  }
  ReturnSeries out = r;
  const double m = mean_of(r.values);
  for (double& v : out.values) v -= m;
  out.demeaned = true;
  return out;
}

/// Price variable starts at level 0 and has one more point than the returns;
/// the cumulative volatility variables have the same length as the returns.
inline SeriesPath build_variable(const ReturnSeries& r, VariableKind kind) {
  if (r.size() < 2) {
    throw Error(ErrorCode::TooShort, "need at least two returns to build a variable");
  }
  SeriesPath out;
  out.variable_kind = kind;
  double acc = 0.0;
  switch (kind) {
    case VariableKind::price:
      out.values.reserve(r.size() + 1);
      out.values.push_back(0.0);
      for (double v : r.values) out.values.push_back(acc += v);
      break;
    case VariableKind::cum_abs_return:
      out.values.reserve(r.size());
      for (double v : r.values) out.values.push_back(acc += std::abs(v));
      break;
    case VariableKind::cum_sq_return:
      out.values.reserve(r.size());
      for (double v : r.values) out.values.push_back(acc += v * v);
      break;
  }
  return out;
}

/// Fisher-Yates permutation of the returns; metadata is carried over.
inline ReturnSeries shuffle(const ReturnSeries& r, Rng& rng) {
  if (r.values.empty()) {
    throw Error(ErrorCode::TooShort, "cannot shuffle an empty series");
  }
  ReturnSeries out = r;
  auto& v = out.values;
  for (std::size_t i = v.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(v[i], v[j]);
  }
  return out;
}

}  // namespace ghelab
