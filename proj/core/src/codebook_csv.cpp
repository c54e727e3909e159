// SPDX-License-Identifier: Apache-2.0
//
// dpbeam: hybrid beamforming codebooks for dual-polarized UPA backhaul links
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "dpbeam/codebook_csv.hpp"

#include <cstdio>
#include <fstream>

namespace dpbeam {

std::string csv_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return std::string(buf);
}

std::vector<CodebookCsvRow> codeword_rows(const Codeword& w) {
    std::vector<CodebookCsvRow> rows;
    CodebookCsvRow base;
    base.end = w.end;
    base.criterion = w.criterion;
    base.p = w.p;
    base.q = w.q;

    CodebookCsvRow dual = base;
    dual.part = (w.pol == PolLayout::Dual) ? "dual" : "single";
    dual.values = w.w;
    rows.push_back(std::move(dual));

    if (w.hybrid) {
        const HybridBeamformer& hb = *w.hybrid;
        for (Eigen::Index n = 0; n < hb.analog.cols(); ++n) {
            CodebookCsvRow r = base;
            r.part = "analog" + std::to_string(n + 1);
            r.values = hb.analog.col(n);
            rows.push_back(std::move(r));
        }
        CodebookCsvRow d = base;
        d.part = "digital";
        d.values = hb.digital;
        rows.push_back(std::move(d));
    }
    return rows;
}

void write_codebook_csv(std::ostream& os, const CsvMetadata& metadata,
                        const std::vector<CodebookCsvRow>& rows) {
    os << "#";
    for (const auto& [key, value] : metadata) os << " " << key << "=" << value;
    os << "\n";
    os << "end,criterion,p,q,part,re0,im0,re1,im1,...\n";
    for (const CodebookCsvRow& row : rows) {
        os << (row.end == LinkEnd::Tx ? "tx" : "rx") << "," << to_string(row.criterion) << ","
           << row.p << "," << row.q << "," << row.part;
        for (Eigen::Index i = 0; i < row.values.size(); ++i) {
            os << "," << csv_number(row.values[i].real()) << ","
               << csv_number(row.values[i].imag());
        }
        os << "\n";
    }
}

void write_codebook_csv_file(const std::string& path, const CsvMetadata& metadata,
                             const std::vector<CodebookCsvRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    write_codebook_csv(out, metadata, rows);
    out.flush();
    if (!out) throw io_error("write failed: " + path);
}

}  // namespace dpbeam
