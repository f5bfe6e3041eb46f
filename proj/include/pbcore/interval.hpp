#pragma once

#include <mpfr.h>

#include <vector>

#include "pbcore/rat.hpp"

namespace pbcore {

// Shape of an irrational satisfaction value. The shape plus the multiset of
// cost terms fully determines the real number, so comparisons can re-evaluate
// enclosures at any precision.
enum class IrShape {
  SumLog1p,    // sum over terms t of ln(1 + t)
  SumSqrt,     // sum over terms t of sqrt(t)
  Log1pTotal,  // ln(1 + t) of a single total term
  SqrtTotal,   // sqrt(t) of a single total term
};

// Enclosure of a real value by exact rational endpoints: lo <= x <= hi.
struct RatInterval {
  Rat lo, hi;
  unsigned bits = 0;
};

namespace detail {

class MpfrReal {
 public:
  explicit MpfrReal(mpfr_prec_t bits) { mpfr_init2(v_, bits); }
  ~MpfrReal() { mpfr_clear(v_); }
  MpfrReal(const MpfrReal&) = delete;
  MpfrReal& operator=(const MpfrReal&) = delete;
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

// Binary floats are dyadic rationals, so this conversion is exact.
inline Rat rat_from_mpfr(mpfr_srcptr x) {
  if (mpfr_zero_p(x)) return Rat(0);
  mpz_class mant;
  mpfr_exp_t e = mpfr_get_z_2exp(mant.get_mpz_t(), x);
  Rat r(mant);
  if (e >= 0)
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  else
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  return r;
}

// One pass over the whole expression with every operation rounded toward the
// requested side; the result therefore bounds the true value. ln and sqrt are
// correctly rounded by MPFR at the chosen direction.
inline Rat eval_directed(IrShape shape, const std::vector<Rat>& terms, mpfr_prec_t bits,
                         mpfr_rnd_t rnd) {
  MpfrReal acc(bits), tmp(bits);
  mpfr_set_ui(acc.get(), 0, rnd);
  switch (shape) {
    case IrShape::SumLog1p:
      for (const Rat& t : terms) {
        Rat arg = t + 1;
        mpfr_set_q(tmp.get(), arg.get_mpq_t(), rnd);
        mpfr_log(tmp.get(), tmp.get(), rnd);
        mpfr_add(acc.get(), acc.get(), tmp.get(), rnd);
      }
      break;
    case IrShape::SumSqrt:
      for (const Rat& t : terms) {
        mpfr_set_q(tmp.get(), t.get_mpq_t(), rnd);
        mpfr_sqrt(tmp.get(), tmp.get(), rnd);
        mpfr_add(acc.get(), acc.get(), tmp.get(), rnd);
      }
      break;
    case IrShape::Log1pTotal: {
      Rat total(1);
      for (const Rat& t : terms) total += t;
      mpfr_set_q(acc.get(), total.get_mpq_t(), rnd);
      mpfr_log(acc.get(), acc.get(), rnd);
      break;
    }
    case IrShape::SqrtTotal: {
      Rat total(0);
      for (const Rat& t : terms) total += t;
      mpfr_set_q(acc.get(), total.get_mpq_t(), rnd);
      mpfr_sqrt(acc.get(), acc.get(), rnd);
      break;
    }
  }
  return rat_from_mpfr(acc.get());
}

}  // namespace detail

// Sound enclosure of the value described by (shape, terms) at the given
// working precision. All intermediates are monotone, so raising the precision
// shrinks the enclosure and never shifts it off the true value.
inline RatInterval enclose(IrShape shape, const std::vector<Rat>& terms, unsigned bits) {
  return {detail::eval_directed(shape, terms, static_cast<mpfr_prec_t>(bits), MPFR_RNDD),
          detail::eval_directed(shape, terms, static_cast<mpfr_prec_t>(bits), MPFR_RNDU), bits};
}

}  // namespace pbcore
