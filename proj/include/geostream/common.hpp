#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>

namespace geostream {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Exit-code classes used by the CLI: 2 config, 3 data, 4 algorithmic.
enum class ErrorClass { Config = 2, Data = 3, Algorithm = 4 };

class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what, ErrorClass cls)
        : std::runtime_error(name + ": " + what), name_(std::move(name)), cls_(cls) {}

    const std::string& name() const { return name_; }
    ErrorClass error_class() const { return cls_; }
    int exit_code() const { return static_cast<int>(cls_); }

private:
    std::string name_;
    ErrorClass cls_;
};

inline Error config_error(const std::string& name, const std::string& what) {
    return Error(name, what, ErrorClass::Config);
}
inline Error data_error(const std::string& name, const std::string& what) {
    return Error(name, what, ErrorClass::Data);
}
inline Error algo_error(const std::string& name, const std::string& what) {
    return Error(name, what, ErrorClass::Algorithm);
}

void require_finite(const Matrix& a, const char* context);
void require_finite(const Vector& a, const char* context);

// Smallest power of two >= w, exact in the floating point sense.
double round_up_pow2(double w);
// Largest power of two <= w.
double round_down_pow2(double w);

}  // namespace geostream
