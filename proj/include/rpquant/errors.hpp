#ifndef RPQUANT_ERRORS_HPP
#define RPQUANT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rpquant {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define RPQUANT_ERROR_TYPE(NAME)                                               \
    class NAME : public Error {                                               \
    public:                                                                   \
        using Error::Error;                                                   \
    }

// Geometry / statistics
RPQUANT_ERROR_TYPE(EmptySetError);
RPQUANT_ERROR_TYPE(DimensionMismatchError);
RPQUANT_ERROR_TYPE(InvalidParamError);
RPQUANT_ERROR_TYPE(NotAPartitionError);

// Random projection
RPQUANT_ERROR_TYPE(ZeroVectorError);
RPQUANT_ERROR_TYPE(NotPsdError);
RPQUANT_ERROR_TYPE(NotApplicableError);
RPQUANT_ERROR_TYPE(NonOrthonormalBasisError);

// Tree construction / serialization
RPQUANT_ERROR_TYPE(DegenerateCellError);
RPQUANT_ERROR_TYPE(SchemaMismatchError);
RPQUANT_ERROR_TYPE(CorruptInputError);

// Enumeration guards
RPQUANT_ERROR_TYPE(TooLargeError);

// CNF parsing / reduction pipeline
RPQUANT_ERROR_TYPE(ParseError);
RPQUANT_ERROR_TYPE(ValidationError);
RPQUANT_ERROR_TYPE(StructureError);
RPQUANT_ERROR_TYPE(RestrictionViolatedError);
RPQUANT_ERROR_TYPE(IncompleteAssignmentError);
RPQUANT_ERROR_TYPE(NotNaeSatisfyingError);
RPQUANT_ERROR_TYPE(EmptyClusterError);
RPQUANT_ERROR_TYPE(NotSymmetricError);
RPQUANT_ERROR_TYPE(NonzeroDiagonalError);
RPQUANT_ERROR_TYPE(NotEmbeddableError);

#undef RPQUANT_ERROR_TYPE

} // namespace rpquant

#endif
