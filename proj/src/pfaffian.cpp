#include "puncvol/pfaffian.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <utility>

#include "puncvol/errors.hpp"
#include "puncvol/matrixkit.hpp"

namespace puncvol::pfaffian {

namespace {

void check_guard(int n) {
  if (n < 1 || n > 3) throw ResourceError("symbolic expansion supports 1 <= n <= 3");
}

// Sorts `idx` in place, returning the permutation sign, or 0 on a repeat.
int sort_with_sign(std::vector<int>& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i)
    for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
      if (idx[j - 1] == idx[j]) return 0;
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  return sign;
}

int permutation_sign(const std::vector<int>& p) {
  std::size_t inversions = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

std::string symbol_name(Symbol s) {
  return "a" + std::to_string(symbol_row(s)) + std::to_string(symbol_col(s));
}

}  // namespace

// ---------------------------------------------------------------- RationalPoly

RationalPoly RationalPoly::constant(const Rational& c) {
  RationalPoly p;
  p.add_term({}, c);
  return p;
}

RationalPoly RationalPoly::variable(Symbol s) {
  RationalPoly p;
  p.add_term({s}, Rational(1));
  return p;
}

void RationalPoly::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

RationalPoly& RationalPoly::operator+=(const RationalPoly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

RationalPoly& RationalPoly::operator-=(const RationalPoly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

RationalPoly& RationalPoly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

RationalPoly operator*(const RationalPoly& a, const RationalPoly& b) {
  RationalPoly r;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m;
      m.reserve(ma.size() + mb.size());
      std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(m));
      r.add_term(m, ca * cb);
    }
  return r;
}

Rational RationalPoly::evaluate(const std::map<Symbol, Rational>& values) const {
  Rational total = 0;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (Symbol s : m) {
      auto it = values.find(s);
      if (it == values.end()) throw DomainError("evaluate: missing value for " + symbol_name(s));
      t *= it->second;
    }
    total += t;
  }
  return total;
}

std::size_t RationalPoly::max_degree() const {
  std::size_t d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.size());
  return d;
}

std::string RationalPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    Rational mag = c < 0 ? Rational(-c) : c;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    const bool unit = (mag == 1);
    if (!unit || m.empty()) os << mag;
    for (std::size_t i = 0; i < m.size(); ++i)
      os << ((i == 0 && unit) ? "" : "*") << symbol_name(m[i]);
  }
  return os.str();
}

// ---------------------------------------------------------------- ExteriorForm

ExteriorForm::ExteriorForm(int dim, int degree) : dim_(dim), degree_(degree) {
  if (dim < 1 || degree < 0 || degree > dim)
    throw DomainError("ExteriorForm: degree outside 0..dim");
}

ExteriorForm ExteriorForm::monomial(int dim, const std::vector<int>& indices,
                                    const RationalPoly& coeff) {
  ExteriorForm f(dim, static_cast<int>(indices.size()));
  std::vector<int> idx = indices;
  for (int i : idx)
    if (i < 1 || i > dim) throw DomainError("ExteriorForm: generator index out of range");
  const int sign = sort_with_sign(idx);
  if (sign == 0) return f;
  f.add(BasisTuple(idx.begin(), idx.end()), sign > 0 ? coeff : -coeff);
  return f;
}

RationalPoly ExteriorForm::coefficient(const BasisTuple& t) const {
  auto it = coeffs_.find(t);
  return it == coeffs_.end() ? RationalPoly{} : it->second;
}

void ExteriorForm::add(const BasisTuple& t, const RationalPoly& p) {
  if (static_cast<int>(t.size()) != degree_) throw DomainError("ExteriorForm: tuple degree mismatch");
  if (p.is_zero()) return;
  auto [it, inserted] = coeffs_.try_emplace(t, p);
  if (!inserted) {
    it->second += p;
    if (it->second.is_zero()) coeffs_.erase(it);
  }
}

void ExteriorForm::check_compatible(const ExteriorForm& o) const {
  if (dim_ != o.dim_ || degree_ != o.degree_)
    throw DomainError("ExteriorForm: incompatible dimension or degree");
}

ExteriorForm& ExteriorForm::operator+=(const ExteriorForm& o) {
  check_compatible(o);
  for (const auto& [t, p] : o.coeffs_) add(t, p);
  return *this;
}

ExteriorForm& ExteriorForm::operator-=(const ExteriorForm& o) {
  check_compatible(o);
  for (const auto& [t, p] : o.coeffs_) add(t, -p);
  return *this;
}

ExteriorForm& ExteriorForm::operator*=(const RationalPoly& p) {
  std::map<BasisTuple, RationalPoly> out;
  for (auto& [t, c] : coeffs_) {
    RationalPoly q = c * p;
    if (!q.is_zero()) out.emplace(t, std::move(q));
  }
  coeffs_ = std::move(out);
  return *this;
}

ExteriorForm wedge(const ExteriorForm& f, const ExteriorForm& g) {
  if (f.dim() != g.dim()) throw DomainError("wedge: generator counts differ");
  if (f.degree() + g.degree() > f.dim()) throw DomainError("wedge: degree overflow");
  ExteriorForm r(f.dim(), f.degree() + g.degree());
  std::vector<int> idx;
  for (const auto& [tf, pf] : f.coefficients())
    for (const auto& [tg, pg] : g.coefficients()) {
      idx.assign(tf.begin(), tf.end());
      idx.insert(idx.end(), tg.begin(), tg.end());
      const int sign = sort_with_sign(idx);
      if (sign == 0) continue;
      RationalPoly p = pf * pg;
      if (sign < 0) p *= Rational(-1);
      r.add(BasisTuple(idx.begin(), idx.end()), p);
    }
  return r;
}

// ---------------------------------------------------------------- Euler form

ExteriorForm connection_form(int n, int a) {
  const int dim = 2 * n + 1;
  ExteriorForm f(dim, 1);
  for (int b = 1; b <= dim; ++b)
    f += ExteriorForm::monomial(dim, {b}, -RationalPoly::variable(symbol(a, b)));
  return f;
}

ExteriorForm normal_curvature(int n, int a, int b) {
  const int dim = 2 * n + 1;
  ExteriorForm f = ExteriorForm::monomial(dim, {a, b});
  f += wedge(connection_form(n, a), connection_form(n, b));
  return f;
}

RationalPoly symbolic_minor(const std::vector<std::size_t>& rows,
                            const std::vector<std::size_t>& cols) {
  if (rows.size() != cols.size()) throw DomainError("symbolic_minor: non-square selection");
  std::vector<int> perm(rows.size());
  std::iota(perm.begin(), perm.end(), 0);
  RationalPoly det;
  if (rows.empty()) return RationalPoly::constant(1);
  do {
    Monomial m;
    for (std::size_t i = 0; i < rows.size(); ++i)
      m.push_back(symbol(static_cast<int>(rows[i]) + 1, static_cast<int>(cols[perm[i]]) + 1));
    std::sort(m.begin(), m.end());
    det.add_term(m, Rational(permutation_sign(perm)));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

namespace {

// Depth-first walk over S_2n, two entries at a time, so that wedge products
// of shared prefixes are computed once.
void accumulate_pfaffian(int n, const std::vector<std::vector<ExteriorForm>>& omega,
                         std::vector<int>& perm, std::vector<bool>& used,
                         const ExteriorForm& prefix, ExteriorForm& total) {
  const int m = 2 * n;
  if (static_cast<int>(perm.size()) == m) {
    if (permutation_sign(perm) > 0)
      total += prefix;
    else
      total -= prefix;
    return;
  }
  for (int a = 1; a <= m; ++a) {
    if (used[a]) continue;
    used[a] = true;
    for (int b = 1; b <= m; ++b) {
      if (used[b]) continue;
      used[b] = true;
      perm.push_back(a);
      perm.push_back(b);
      accumulate_pfaffian(n, omega, perm, used, wedge(prefix, omega[a][b]), total);
      perm.pop_back();
      perm.pop_back();
      used[b] = false;
    }
    used[a] = false;
  }
}

}  // namespace

ScaledForm euler_form_expansion(int n) {
  check_guard(n);
  const int dim = 2 * n + 1;
  const int m = 2 * n;
  std::vector<std::vector<ExteriorForm>> omega(m + 1, std::vector<ExteriorForm>(m + 1, ExteriorForm(dim, 2)));
  for (int a = 1; a <= m; ++a)
    for (int b = 1; b <= m; ++b)
      if (a != b) omega[a][b] = normal_curvature(n, a, b);

  ExteriorForm total(dim, m);
  std::vector<int> perm;
  std::vector<bool> used(m + 1, false);
  accumulate_pfaffian(n, omega, perm, used, ExteriorForm::monomial(dim, {}), total);

  BigInt fact = 1;
  for (int i = 2; i <= m; ++i) fact *= i;
  return ScaledForm{Rational(BigInt(1), fact), std::move(total)};
}

ScaledForm lemma_rhs_form(int n) {
  check_guard(n);
  const int dim = 2 * n + 1;
  const int m = 2 * n;
  const auto un = static_cast<unsigned>(n);

  std::vector<int> all(dim);
  std::iota(all.begin(), all.end(), 1);
  auto omitting = [&](int l) {
    std::vector<int> t;
    for (int i : all)
      if (i != l) t.push_back(i);
    return t;
  };

  ExteriorForm total(dim, m);
  for (unsigned k = 0; k <= un; ++k) {
    const RationalPoly weight = RationalPoly::constant(sigma_weight(un, k));
    // sigma_2k of (a_ij): principal minors
    RationalPoly sigma;
    if (k == 0) {
      sigma = RationalPoly::constant(1);
    } else {
      matrixkit::for_each_subset(static_cast<std::size_t>(m), 2 * k, [&](std::span<const std::size_t> r) {
        std::vector<std::size_t> rows(r.begin(), r.end());
        sigma += symbolic_minor(rows, rows);
      });
    }
    total += ExteriorForm::monomial(dim, omitting(dim), sigma * weight);
    for (int l = 1; l <= m; ++l) {
      RationalPoly perp;
      for (const auto& t : matrixkit::sigma_perp_terms(n, 2 * k, static_cast<std::size_t>(l))) {
        RationalPoly minor = symbolic_minor(t.rows, t.cols);
        if (t.sign < 0) minor *= Rational(-1);
        perp += minor;
      }
      total += ExteriorForm::monomial(dim, omitting(l), perp * weight);
    }
  }
  return ScaledForm{Rational(1), std::move(total)};
}

DifferenceReport compare(int n, const ScaledForm& euler, const ScaledForm& lemma) {
  DifferenceReport r;
  r.n = n;
  r.basis_tuples = static_cast<std::size_t>(2 * n + 1);
  ExteriorForm diff = euler.form * RationalPoly::constant(euler.scale);
  diff -= lemma.form * RationalPoly::constant(lemma.scale);
  for (const auto& [t, p] : diff.coefficients()) r.nonzero.push_back({t, p});
  r.verified = r.nonzero.empty();
  r.euler = euler;
  r.lemma = lemma;
  return r;
}

DifferenceReport verify_lemma(int n) {
  return compare(n, euler_form_expansion(n), lemma_rhs_form(n));
}

ScaledForm perturb(ScaledForm f, const BasisTuple& tuple) {
  // +1 on the tau-scaled coefficient
  f.form.add(tuple, RationalPoly::constant(Rational(1) / f.scale));
  return f;
}

std::string tuple_name(const BasisTuple& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "^w" : "w") + std::to_string(t[i]);
  return s;
}

namespace {

std::vector<BasisTuple> all_tuples(int n) {
  std::vector<BasisTuple> out;
  const int dim = 2 * n + 1;
  for (int omit = dim; omit >= 1; --omit) {
    BasisTuple t;
    for (int i = 1; i <= dim; ++i)
      if (i != omit) t.push_back(static_cast<std::uint8_t>(i));
    out.push_back(t);
  }
  return out;
}

std::string scaled_coefficient(const ScaledForm& f, const BasisTuple& t) {
  return (f.form.coefficient(t) * RationalPoly::constant(f.scale)).to_string();
}

}  // namespace

nlohmann::json to_json(const DifferenceReport& r) {
  nlohmann::json j;
  j["status"] = r.verified ? "verified" : "mismatch";
  j["n"] = r.n;
  j["basis_tuples"] = r.basis_tuples;
  j["prefactor_token"] = "2/vol(S^" + std::to_string(2 * r.n) + ")";
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& t : all_tuples(r.n)) {
    coeffs.push_back({{"tuple", tuple_name(t)},
                      {"euler", scaled_coefficient(r.euler, t)},
                      {"lemma", scaled_coefficient(r.lemma, t)}});
  }
  j["coefficients"] = coeffs;
  nlohmann::json bad = nlohmann::json::array();
  for (const auto& d : r.nonzero) bad.push_back({{"tuple", tuple_name(d.tuple)}, {"difference", d.difference.to_string()}});
  j["mismatches"] = bad;
  return j;
}

std::string to_text(const DifferenceReport& r) {
  std::ostringstream os;
  os << "Euler form vs closed representative, n = " << r.n << " (coefficients in units of 2/vol(S^"
     << 2 * r.n << "))\n";
  for (const auto& t : all_tuples(r.n)) {
    os << "  " << tuple_name(t) << ":\n"
       << "    pfaffian: " << scaled_coefficient(r.euler, t) << "\n"
       << "    lemma:    " << scaled_coefficient(r.lemma, t) << "\n";
  }
  if (r.verified) {
    os << "status: verified (difference identically zero over " << r.basis_tuples << " basis tuples)\n";
  } else {
    os << "status: mismatch in " << r.nonzero.size() << " tuple(s)\n";
    for (const auto& d : r.nonzero) os << "  " << tuple_name(d.tuple) << ": " << d.difference.to_string() << "\n";
  }
  return os.str();
}

}  // namespace puncvol::pfaffian
