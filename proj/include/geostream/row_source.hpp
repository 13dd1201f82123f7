#pragma once

#include "geostream/common.hpp"

#include <string>

namespace geostream {

// Row stream that can be replayed for multi-pass algorithms. Each rewind()
// increments the pass counter; next() yields rows of the current pass.
class ReplayableRowSource {
public:
    virtual ~ReplayableRowSource() = default;

    virtual void rewind() = 0;
    virtual bool next(Vector& row) = 0;
    virtual Index dim() const = 0;
    virtual Index row_count() const = 0;

    int passes() const { return passes_; }

protected:
    void count_pass() { ++passes_; }

private:
    int passes_ = 0;
};

class MatrixRowSource final : public ReplayableRowSource {
public:
    explicit MatrixRowSource(Matrix A) : A_(std::move(A)) {}

    void rewind() override {
        pos_ = 0;
        count_pass();
    }
    bool next(Vector& row) override {
        if (pos_ >= A_.rows()) return false;
        row = A_.row(pos_++).transpose();
        return true;
    }
    Index dim() const override { return A_.cols(); }
    Index row_count() const override { return A_.rows(); }

private:
    Matrix A_;
    Index pos_ = 0;
};

}  // namespace geostream
