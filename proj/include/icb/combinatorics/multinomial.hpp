#pragma once

#include <functional>
#include <span>
#include <vector>

#include "icb/combinatorics/log_number.hpp"

namespace icb::combinatorics {

double log_factorial(long long n);
LogNumber log_binomial(long long n, long long k);
LogNumber log_multinomial(long long K, std::span<const int> parts);

// Parts floor(K/M) or ceil(K/M), larger parts first.
std::vector<int> balanced_split(int K, int M);
std::vector<int> multinomial_max_location(int K, int M);

// C(K + M - 1, M - 1) as a double.
double composition_count(int K, int M);

// Visits every composition of K into M nonnegative parts in lexicographic order.
void for_each_composition(int K, int M, const std::function<void(std::span<const int>)>& visit);

}  // namespace icb::combinatorics
