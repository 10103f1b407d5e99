#pragma once

#include <stdexcept>
#include <string>

namespace nori {

enum class Errc {
  CompositionNonzero,
  TorsionPresent,
  NotIntegral,
  NotACycle,
  IllDefinedMap,
  DimensionMismatch,
  InvalidComplex,
  InvalidPair,
  NotPairMap,
  NotNested,
  NotACover,
  InvalidFiltration,
  TorsionTerm,
  BudgetExceeded,
  NonFreeVertex,
  InvalidSubdiagram,
  AxiomViolation,
  NotGoodPair,
  ProductEscape,
  IntegralEscape,
  WrongRank,
  MissingProducts,
  InvalidInput,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace nori
