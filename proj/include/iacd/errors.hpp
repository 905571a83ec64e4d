#ifndef IACD_ERRORS_HPP
#define IACD_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iacd {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// trace-model
struct CorruptCapture : Error {
    using Error::Error;
};
struct TruncatedRecord : Error {
    TruncatedRecord(const std::string& msg, std::size_t last_good)
        : Error(msg), last_good_packet(last_good) {}
    std::size_t last_good_packet;
};
struct UnsupportedNetwork : Error {
    using Error::Error;
};
struct SchemaError : Error {
    SchemaError(const std::string& msg, std::size_t line_no)
        : Error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
    std::size_t line;
};
struct EmptyTrace : Error {
    using Error::Error;
};

// signature
struct TracePairMismatch : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct EmptyDatabase : Error {
    using Error::Error;
};

// preprocess
struct LabelLeak : Error {
    using Error::Error;
};
struct DegenerateDatabase : Error {
    using Error::Error;
};

// featsel
struct InsufficientSamples : Error {
    using Error::Error;
};
struct FoldError : Error {
    using Error::Error;
};

// svm
struct SingleClass : Error {
    using Error::Error;
};
struct InvalidModel : Error {
    using Error::Error;
};

// classifiers
struct NoHealthyBaseline : Error {
    using Error::Error;
};

// synth
struct InfeasibleScenario : Error {
    using Error::Error;
};
struct SimOverrun : Error {
    using Error::Error;
};

}  // namespace iacd

#endif  // IACD_ERRORS_HPP
