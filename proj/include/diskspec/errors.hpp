#pragma once

#include <stdexcept>
#include <string>

namespace diskspec {

// Base class for recoverable numerical failures. Precondition violations
// use std::invalid_argument / std::domain_error instead.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

class NoSignChange : public NumericalError {
public:
    explicit NoSignChange(const std::string& msg) : NumericalError("NoSignChange: " + msg) {}
};

class ZeroInsideBracket : public NumericalError {
public:
    explicit ZeroInsideBracket(const std::string& msg) : NumericalError("ZeroInsideBracket: " + msg) {}
};

class WrongSign : public NumericalError {
public:
    explicit WrongSign(const std::string& msg) : NumericalError("WrongSign: " + msg) {}
};

class BranchLost : public NumericalError {
public:
    explicit BranchLost(const std::string& msg) : NumericalError("BranchLost: " + msg) {}
};

class OutOfRegime : public NumericalError {
public:
    explicit OutOfRegime(const std::string& msg) : NumericalError("OutOfRegime: " + msg) {}
};

class NonConvergent : public NumericalError {
public:
    explicit NonConvergent(const std::string& msg) : NumericalError("NonConvergent: " + msg) {}
};

class SingularPoint : public NumericalError {
public:
    explicit SingularPoint(const std::string& msg) : NumericalError("SingularPoint: " + msg) {}
};

class UnsupportedOrder : public NumericalError {
public:
    explicit UnsupportedOrder(const std::string& msg) : NumericalError("UnsupportedOrder: " + msg) {}
};

class DegenerateDenominator : public NumericalError {
public:
    explicit DegenerateDenominator(const std::string& msg) : NumericalError("DegenerateDenominator: " + msg) {}
};

class NotDegenerate : public NumericalError {
public:
    explicit NotDegenerate(const std::string& msg) : NumericalError("NotDegenerate: " + msg) {}
};

class NoDip : public NumericalError {
public:
    explicit NoDip(const std::string& msg) : NumericalError("NoDip: " + msg) {}
};

class MultipleDips : public NumericalError {
public:
    explicit MultipleDips(const std::string& msg) : NumericalError("MultipleDips: " + msg) {}
};

class IllConditioned : public NumericalError {
public:
    explicit IllConditioned(const std::string& msg) : NumericalError("IllConditioned: " + msg) {}
};

} // namespace diskspec
