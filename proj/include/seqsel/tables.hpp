#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace seqsel {

// One reference table entry, kept as the printed decimal string.
struct GoldenValue {
    const char* key;
    const char* value;
    // Contradicted by exact recomputation; reported but not compared.
    bool erratum = false;
    const char* note = "";
    // Printed by truncation rather than rounding: accepted when printed <= computed < printed + 1e-5.
    bool truncated = false;
};

struct TableCell {
    std::string key;
    double value;
};

struct TableOutput {
    int id = 0;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<TableCell> cells;
    // Entries left out by the size cap.
    std::vector<std::string> skipped;

    void write_csv(std::ostream& out) const;
};

struct TableRequest {
    int table_id = 0;
    // Largest n / N_max computed; nullopt means the per-table default.
    std::optional<long long> size_cap;
    bool allow_large = false;
};

constexpr int kTableCount = 8;

TableOutput build_table(const TableRequest& req);
std::span<const GoldenValue> golden_values(int table_id);

struct TableCheck {
    int compared = 0;
    int mismatches = 0;
    int errata = 0;
    int truncated = 0;
    std::vector<std::string> messages;
    bool ok() const { return mismatches == 0; }
};

TableCheck check_table(const TableOutput& table, double tolerance = 5e-6);

}  // namespace seqsel
