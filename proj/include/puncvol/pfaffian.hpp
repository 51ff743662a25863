#pragma once

// Exact exterior algebra over polynomials in the formal symbols a_AB
// (1 <= A <= 2n, 1 <= B <= 2n+1) with rational coefficients.
//
// euler_form_expansion() expands the Pfaffian of the normal curvature
// Omega_perp_AB = omega_A ^ omega_B + omega_{A,2n+1} ^ omega_{B,2n+1}
// by brute force over S_2n; lemma_rhs_form() builds the closed
// representative from sigma_2k and sigma_perp (using the matrixkit index
// and sign conventions); verify_lemma() subtracts the two.
//
// No floating point is used in this module.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "puncvol/rational.hpp"

namespace puncvol::pfaffian {

/// Symbol a_{row,col}, 1-based, packed as row * 16 + col.
using Symbol = std::uint8_t;
constexpr Symbol symbol(int row, int col) { return static_cast<Symbol>(row * 16 + col); }
constexpr int symbol_row(Symbol s) { return s / 16; }
constexpr int symbol_col(Symbol s) { return s % 16; }

/// Sorted multiset of symbols.
using Monomial = std::vector<Symbol>;

class RationalPoly {
 public:
  RationalPoly() = default;
  static RationalPoly constant(const Rational& c);
  static RationalPoly variable(Symbol s);

  bool is_zero() const { return terms_.empty(); }
  const std::map<Monomial, Rational>& terms() const { return terms_; }

  RationalPoly& operator+=(const RationalPoly& o);
  RationalPoly& operator-=(const RationalPoly& o);
  RationalPoly& operator*=(const Rational& c);
  friend RationalPoly operator+(RationalPoly a, const RationalPoly& b) { return a += b; }
  friend RationalPoly operator-(RationalPoly a, const RationalPoly& b) { return a -= b; }
  friend RationalPoly operator*(const RationalPoly& a, const RationalPoly& b);
  friend RationalPoly operator*(RationalPoly a, const Rational& c) { return a *= c; }
  friend RationalPoly operator-(RationalPoly a) { return a *= Rational(-1); }
  friend bool operator==(const RationalPoly&, const RationalPoly&) = default;

  /// Adds c * m, dropping the entry when it cancels.
  void add_term(const Monomial& m, const Rational& c);

  Rational evaluate(const std::map<Symbol, Rational>& values) const;
  std::size_t max_degree() const;
  std::string to_string() const;

 private:
  std::map<Monomial, Rational> terms_;
};

/// Strictly increasing tuple of generator indices 1..dim.
using BasisTuple = std::vector<std::uint8_t>;

class ExteriorForm {
 public:
  /// The zero form of the given degree on `dim` generators.
  ExteriorForm(int dim, int degree);

  /// coeff * omega_{i_1} ^ ... ^ omega_{i_d}; indices may be unsorted or
  /// repeated, the result is sign-normalized (zero on a repeat).
  static ExteriorForm monomial(int dim, const std::vector<int>& indices,
                               const RationalPoly& coeff = RationalPoly::constant(1));

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::map<BasisTuple, RationalPoly>& coefficients() const { return coeffs_; }
  /// Zero polynomial when the tuple is absent.
  RationalPoly coefficient(const BasisTuple& t) const;

  void add(const BasisTuple& t, const RationalPoly& p);
  ExteriorForm& operator+=(const ExteriorForm& o);
  ExteriorForm& operator-=(const ExteriorForm& o);
  ExteriorForm& operator*=(const RationalPoly& p);
  friend ExteriorForm operator+(ExteriorForm a, const ExteriorForm& b) { return a += b; }
  friend ExteriorForm operator-(ExteriorForm a, const ExteriorForm& b) { return a -= b; }
  friend ExteriorForm operator*(ExteriorForm a, const RationalPoly& p) { return a *= p; }
  friend bool operator==(const ExteriorForm&, const ExteriorForm&) = default;

 private:
  void check_compatible(const ExteriorForm& o) const;

  int dim_;
  int degree_;
  std::map<BasisTuple, RationalPoly> coeffs_;
};

/// Graded-antisymmetric exterior product. Throws DomainError when the
/// degrees overflow the generator count or the dimensions differ.
ExteriorForm wedge(const ExteriorForm& f, const ExteriorForm& g);

/// A form multiplied by scale * tau, where tau = 2 / vol(S^{2n}) is kept as
/// an opaque token.
struct ScaledForm {
  Rational scale{1};
  ExteriorForm form{1, 0};
};

/// omega_{A,2n+1} = -sum_B a_AB omega_B as a 1-form (A in 1..2n).
ExteriorForm connection_form(int n, int a);

/// Omega_perp_{AB} on the unit round sphere.
ExteriorForm normal_curvature(int n, int a, int b);

/// Symbolic determinant (Leibniz) of a_{rows, cols}; indices 0-based as in
/// matrixkit::PerpTerm.
RationalPoly symbolic_minor(const std::vector<std::size_t>& rows,
                            const std::vector<std::size_t>& cols);

/// Pfaffian Euler form with declared prefactor 1/(2n)! * tau. 1 <= n <= 3.
ScaledForm euler_form_expansion(int n);

/// sum_k C(n,k)/C(2n,2k) W(k) with prefactor tau. 1 <= n <= 3.
ScaledForm lemma_rhs_form(int n);

struct TupleDifference {
  BasisTuple tuple;
  RationalPoly difference;
};

struct DifferenceReport {
  int n = 0;
  bool verified = false;
  std::size_t basis_tuples = 0;  // number of 2n-tuples on 2n+1 generators
  std::vector<TupleDifference> nonzero;
  ScaledForm euler;
  ScaledForm lemma;
};

/// Both forms are brought to the common token tau and subtracted.
DifferenceReport compare(int n, const ScaledForm& euler, const ScaledForm& lemma);

/// compare(n, euler_form_expansion(n), lemma_rhs_form(n)).
DifferenceReport verify_lemma(int n);

/// Adds +1 to the coefficient of `tuple` in `f` (fault injection for self-tests).
ScaledForm perturb(ScaledForm f, const BasisTuple& tuple);

std::string tuple_name(const BasisTuple& t);
nlohmann::json to_json(const DifferenceReport& r);
std::string to_text(const DifferenceReport& r);

}  // namespace puncvol::pfaffian
