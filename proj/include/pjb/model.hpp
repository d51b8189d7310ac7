#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace pjb {

enum class Letter : char { odd = 'o', even = 'e' };

/// Coupling-type word over {o, e}. Letter j selects whether coupling j
/// follows t ('o') or |t| ('e').
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters);

  std::size_t size() const { return letters_.size(); }
  Letter operator[](std::size_t j) const { return letters_[j]; }
  const std::vector<Letter>& letters() const { return letters_; }
  std::string str() const;

  bool operator==(const Word&) const = default;

 private:
  std::vector<Letter> letters_;
};

/// Accepts 'o'/'e' in either case; rejects empty text or any other character.
Word parse_word(std::string_view text);

/// Binary index with the first letter as the most significant bit, e = 1.
std::uint64_t word_index(const Word& w);
Word word_from_index(std::size_t length, std::uint64_t index);

/// Coupling values xi_1..xi_J at time t.
std::vector<double> couplings(const Word& w, double t);

/// Default sweep range is |t| <= 0.5; beyond it the couplings 1 - xi approach
/// a sign change at xi = 1.
inline constexpr double kDefaultTimeBound = 0.5;
inline bool outside_default_range(double t) { return t < -kDefaultTimeBound || t > kDefaultTimeBound; }

/// Real N x N tridiagonal operator with zero diagonal. Sub- and
/// superdiagonal position k (1-based) carry xi_{m(k)} and 1 - xi_{m(k)} with
/// m(k) = min(k, N - k).
class LatticeOperator {
 public:
  int n() const { return n_; }
  const Word& word() const { return word_; }
  double t() const { return t_; }

  const Eigen::MatrixXd& dense() const { return entries_; }
  /// Entries (k, k-1), k = 1..N-1.
  Eigen::VectorXd sub() const { return entries_.diagonal(-1); }
  /// Entries (k-1, k), k = 1..N-1.
  Eigen::VectorXd sup() const { return entries_.diagonal(1); }

  double frobenius_norm() const { return entries_.norm(); }

 private:
  friend LatticeOperator build_operator(int n, const Word& w, double t);

  int n_ = 0;
  Word word_;
  double t_ = 0.0;
  Eigen::MatrixXd entries_;
};

/// m(k) = min(k, N - k), 1-based.
inline int coupling_position(int n, int k) { return k < n - k ? k : n - k; }

LatticeOperator build_operator(int n, const Word& w, double t);

/// The n x n nilpotent Jordan block, i.e. build_operator(n, o...o, 0).
LatticeOperator jordan_block(int n);

}  // namespace pjb
