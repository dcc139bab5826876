#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wnl/store.hpp"

namespace wnl {

struct ReportBundle {
    std::size_t records = 0;
    std::string markdown;
    /// (file name, RFC-4180 content)
    std::vector<std::pair<std::string, std::string>> csv_files;
};

/// Markdown tables and CSV files for the records whose command matches `filter` (all when empty).
ReportBundle build_report(const std::vector<StoredRecord>& records, const std::string& filter);

}  // namespace wnl
