#include "pjb/model.hpp"

#include <cmath>

#include "pjb/errors.hpp"

namespace pjb {

Word::Word(std::vector<Letter> letters) : letters_(std::move(letters)) {
  if (letters_.empty()) throw DomainError("word must contain at least one letter");
  for (Letter c : letters_) {
    if (c != Letter::odd && c != Letter::even) throw DomainError("word letters must be 'o' or 'e'");
  }
}

std::string Word::str() const {
  std::string out;
  out.reserve(letters_.size());
  for (Letter c : letters_) out.push_back(static_cast<char>(c));
  return out;
}

Word parse_word(std::string_view text) {
  if (text.empty()) throw DomainError("empty word");
  std::vector<Letter> letters;
  letters.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case 'o':
      case 'O':
        letters.push_back(Letter::odd);
        break;
      case 'e':
      case 'E':
        letters.push_back(Letter::even);
        break;
      default:
        throw DomainError("invalid letter '" + std::string(1, c) + "' in word \"" + std::string(text) +
                          "\" (expected o or e)");
    }
  }
  return Word(std::move(letters));
}

std::uint64_t word_index(const Word& w) {
  std::uint64_t index = 0;
  for (Letter c : w.letters()) index = (index << 1) | (c == Letter::even ? 1u : 0u);
  return index;
}

Word word_from_index(std::size_t length, std::uint64_t index) {
  if (length == 0 || length > 63) throw DomainError("word length must be in [1, 63]");
  if (index >> length) throw DomainError("word index " + std::to_string(index) + " out of range for length " +
                                         std::to_string(length));
  std::vector<Letter> letters(length);
  for (std::size_t j = 0; j < length; ++j) {
    const bool bit = (index >> (length - 1 - j)) & 1u;
    letters[j] = bit ? Letter::even : Letter::odd;
  }
  return Word(std::move(letters));
}

std::vector<double> couplings(const Word& w, double t) {
  std::vector<double> xi(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) xi[j] = w[j] == Letter::even ? std::abs(t) : t;
  return xi;
}

LatticeOperator build_operator(int n, const Word& w, double t) {
  if (n < 2) throw DomainError("matrix dimension must be >= 2, got " + std::to_string(n));
  if (w.size() != static_cast<std::size_t>(n / 2)) {
    throw DomainError("word \"" + w.str() + "\" has length " + std::to_string(w.size()) + ", dimension " +
                      std::to_string(n) + " requires " + std::to_string(n / 2));
  }
  if (!std::isfinite(t)) throw DomainError("time parameter must be finite");

  const std::vector<double> xi = couplings(w, t);
  LatticeOperator q;
  q.n_ = n;
  q.word_ = w;
  q.t_ = t;
  q.entries_ = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double x = xi[coupling_position(n, k) - 1];
    q.entries_(k, k - 1) = x;
    q.entries_(k - 1, k) = 1.0 - x;
  }
  return q;
}

LatticeOperator jordan_block(int n) {
  if (n < 2) throw DomainError("Jordan block dimension must be >= 2, got " + std::to_string(n));
  return build_operator(n, Word(std::vector<Letter>(n / 2, Letter::odd)), 0.0);
}

}  // namespace pjb
