#include "lmival/polyalg/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lmival::polyalg {

Polynomial::Polynomial(VarSpace space, Terms terms) : space_(std::move(space))
{
    for (auto& [alpha, c] : terms) {
        if (alpha.size() != space_.size())
            throw std::invalid_argument("exponent vector " + alpha.to_string()
                                        + " does not match a space of dimension "
                                        + std::to_string(space_.size()));
        if (c != 0.0)
            terms_.emplace(alpha, c);
    }
}

Polynomial Polynomial::constant(VarSpace space, double c)
{
    Polynomial p(std::move(space));
    p.add_term(MultiIndex(p.space_.size()), c);
    return p;
}

Polynomial Polynomial::variable(VarSpace space, std::size_t index)
{
    Polynomial p(std::move(space));
    p.add_term(MultiIndex::unit(p.space_.size(), index), 1.0);
    return p;
}

Polynomial Polynomial::variable(VarSpace space, std::string_view name)
{
    auto i = space.index_of(name);
    return variable(std::move(space), i);
}

Polynomial Polynomial::monomial(VarSpace space, MultiIndex alpha, double c)
{
    if (alpha.size() != space.size())
        throw std::invalid_argument("monomial exponent length mismatch");
    Polynomial p(std::move(space));
    p.add_term(alpha, c);
    return p;
}

unsigned Polynomial::degree() const noexcept
{
    // Terms are grlex-ordered, so the last one has maximal degree.
    return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

double Polynomial::coefficient(MultiIndex const& alpha) const
{
    auto it = terms_.find(alpha);
    return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::constant_term() const
{
    if (terms_.empty())
        return 0.0;
    auto const& first = *terms_.begin();
    return first.first.degree() == 0 ? first.second : 0.0;
}

void Polynomial::add_term(MultiIndex const& alpha, double c)
{
    if (c == 0.0)
        return;
    auto [it, inserted] = terms_.try_emplace(alpha, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0)
            terms_.erase(it);
    }
}

Polynomial& Polynomial::operator+=(Polynomial const& q)
{
    require_same_space(space_, q.space_, "polynomial addition");
    for (auto const& [alpha, c] : q.terms_)
        add_term(alpha, c);
    return *this;
}

Polynomial& Polynomial::operator-=(Polynomial const& q)
{
    require_same_space(space_, q.space_, "polynomial subtraction");
    for (auto const& [alpha, c] : q.terms_)
        add_term(alpha, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(Polynomial const& q)
{
    require_same_space(space_, q.space_, "polynomial multiplication");
    Polynomial out(space_);
    for (auto const& [a, ca] : terms_)
        for (auto const& [b, cb] : q.terms_)
            out.add_term(a + b, ca * cb);
    terms_ = std::move(out.terms_);
    return *this;
}

Polynomial& Polynomial::operator*=(double s)
{
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
        it->second *= s;
        if (it->second == 0.0)
            it = terms_.erase(it);
        else
            ++it;
    }
    return *this;
}

Polynomial Polynomial::operator-() const
{
    Polynomial p(*this);
    for (auto& [alpha, c] : p.terms_)
        c = -c;
    return p;
}

Polynomial Polynomial::pow(unsigned k) const
{
    Polynomial result = constant(space_, 1.0);
    Polynomial base = *this;
    while (k) {
        if (k & 1u)
            result *= base;
        k >>= 1u;
        if (k)
            base *= base;
    }
    return result;
}

Polynomial Polynomial::diff(std::size_t var) const
{
    if (var >= space_.size())
        throw std::invalid_argument("derivative variable index out of range");
    Polynomial out(space_);
    for (auto const& [alpha, c] : terms_) {
        if (alpha[var] == 0)
            continue;
        MultiIndex beta = alpha;
        beta[var] -= 1;
        out.add_term(beta, c * alpha[var]);
    }
    return out;
}

Polynomial Polynomial::diff(std::string_view var) const
{
    return diff(space_.index_of(var));
}

double Polynomial::eval(std::span<double const> point) const
{
    std::size_t const n = space_.size();
    if (point.size() != n)
        throw std::invalid_argument("evaluation point has dimension "
                                    + std::to_string(point.size()) + ", expected "
                                    + std::to_string(n));
    if (terms_.empty())
        return 0.0;

    // Power tables up to the largest exponent of each variable.
    std::vector<unsigned> max_exp(n, 0);
    for (auto const& [alpha, c] : terms_)
        for (std::size_t i = 0; i < n; ++i)
            max_exp[i] = std::max(max_exp[i], alpha[i]);
    std::vector<std::vector<double>> powers(n);
    for (std::size_t i = 0; i < n; ++i) {
        powers[i].resize(max_exp[i] + 1);
        powers[i][0] = 1.0;
        for (unsigned e = 1; e <= max_exp[i]; ++e)
            powers[i][e] = powers[i][e - 1] * point[i];
    }

    // Neumaier summation.
    double sum = 0.0;
    double comp = 0.0;
    for (auto const& [alpha, c] : terms_) {
        double t = c;
        for (std::size_t i = 0; i < n; ++i)
            t *= powers[i][alpha[i]];
        double s = sum + t;
        if (std::abs(sum) >= std::abs(t))
            comp += (sum - s) + t;
        else
            comp += (t - s) + sum;
        sum = s;
    }
    return sum + comp;
}

std::string Polynomial::to_string() const
{
    if (terms_.empty())
        return "0";
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (auto const& [alpha, c] : terms_) {
        if (!first)
            os << (c < 0 ? " - " : " + ");
        else if (c < 0)
            os << "-";
        first = false;
        double const mag = std::abs(c);
        bool const is_const = alpha.degree() == 0;
        if (is_const || mag != 1.0) {
            os << mag;
            if (!is_const)
                os << "*";
        }
        bool first_var = true;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            if (alpha[i] == 0)
                continue;
            if (!first_var)
                os << "*";
            first_var = false;
            os << space_.name(i);
            if (alpha[i] > 1)
                os << "^" << alpha[i];
        }
    }
    return os.str();
}

bool operator==(Polynomial const& a, Polynomial const& b)
{
    return a.space_ == b.space_ && a.terms_ == b.terms_;
}

Polynomial operator+(Polynomial p, Polynomial const& q) { return p += q; }
Polynomial operator-(Polynomial p, Polynomial const& q) { return p -= q; }
Polynomial operator*(Polynomial const& p, Polynomial const& q)
{
    Polynomial r(p);
    r *= q;
    return r;
}
Polynomial operator*(Polynomial p, double s) { return p *= s; }
Polynomial operator*(double s, Polynomial p) { return p *= s; }
Polynomial operator+(Polynomial p, double c)
{
    return p += Polynomial::constant(p.space(), c);
}
Polynomial operator-(Polynomial p, double c)
{
    return p -= Polynomial::constant(p.space(), c);
}
Polynomial operator+(double c, Polynomial p) { return std::move(p) + c; }
Polynomial operator-(double c, Polynomial const& p)
{
    return Polynomial::constant(p.space(), c) - p;
}

}  // namespace lmival::polyalg
