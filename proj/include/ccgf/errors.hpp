#pragma once

#include <stdexcept>
#include <string>

namespace ccgf {

/** Base class for every library error; what() carries the diagnostic. */
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/** Nonconformable slot counts or vector/matrix dimensions. */
class DimensionError : public Error {
public:
    using Error::Error;
};

/** Order comparison requested between non-self-adjoint elements. */
class OrderError : public Error {
public:
    using Error::Error;
};

/** Positivity required but not present (sqrt of a negative, non-PSD operator). */
class PositivityError : public Error {
public:
    using Error::Error;
};

/** Inverse of an element or operator with a vanishing slot / singular block. */
class SingularError : public Error {
public:
    using Error::Error;
};

/** Frame weight with a non-positive slot. */
class WeightError : public Error {
public:
    using Error::Error;
};

/** Controller pair failed commutation validation, or an unvalidated pair was used. */
class CommutationError : public Error {
public:
    using Error::Error;
};

/** A theorem hypothesis failed a numerical check; the message names the check. */
class HypothesisError : public Error {
public:
    using Error::Error;
};

/** Invalid slot map for an algebra morphism. */
class MorphismError : public Error {
public:
    using Error::Error;
};

/** Parameter outside its admissible range. */
class ParamError : public Error {
public:
    using Error::Error;
};

/** Claimed frame bounds fail their operator certificate. */
class BoundsError : public Error {
public:
    using Error::Error;
};

/** Iterative solve exhausted max_iter before reaching tolerance. */
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/** Unreadable file or malformed document. */
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace ccgf
