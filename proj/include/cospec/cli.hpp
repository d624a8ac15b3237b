#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cospec/ruler.hpp"

namespace cospec::cli {

/// One row of a published ruler table: N, the declared M, and the patterns as
/// written (mark counts are checked, not enforced on read).
struct ReferenceRow {
    int N = 0;
    int M = 0;
    std::vector<CosetPattern> patterns;
};

struct RowCheck {
    int N = 0;
    int Z = 0;
    int expected_Z = 0;
    bool passed = false;
    int first_failing_pattern = -1;  // -1 when the failure is not tied to one pattern
    std::vector<int> non_golomb;
    std::vector<int> overlapping;  // patterns sharing a nonzero residue with an earlier one
    std::vector<int> missing;
    std::string message;
};

std::vector<ReferenceRow> read_reference_rows(std::istream& in);
RowCheck check_reference_row(const ReferenceRow& row);

/// Default location of the bundled ruler table.
std::filesystem::path default_table_path();

/// Runs the command line. Returns the process exit code: 0 success, 1 a
/// failed check or runtime error, 2 usage error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cospec::cli
