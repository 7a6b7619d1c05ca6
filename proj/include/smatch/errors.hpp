#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace smatch {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DegeneratePoint : public Error {
public:
    using Error::Error;
};

class EmptySimplex : public Error {
public:
    EmptySimplex() : Error("barycenter of an empty simplex") {}
};

class KTooLarge : public Error {
public:
    KTooLarge(std::size_t k, std::size_t n)
        : Error("k=" + std::to_string(k) + " exceeds the number of points " + std::to_string(n)) {}
};

class EmptyNeighborhood : public Error {
public:
    EmptyNeighborhood() : Error("simplex has no adjacent simplices") {}
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(int a, int b)
        : Error("descriptor dimensions differ: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

class EmptyComplex : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class OffManifold : public Error {
public:
    explicit OffManifold(std::vector<int> ids);
    const std::vector<int>& ids() const { return ids_; }

private:
    std::vector<int> ids_;
};

class InfeasiblePacking : public Error {
public:
    using Error::Error;
};

class EmptyGroundTruth : public Error {
public:
    EmptyGroundTruth() : Error("ground truth has no pairs") {}
};

}  // namespace smatch
