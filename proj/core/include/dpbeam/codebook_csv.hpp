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

#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "dpbeam/codebook.hpp"
#include "dpbeam/types.hpp"

namespace dpbeam {

// All CSV output in the project prints numbers with 9 significant digits.
std::string csv_number(double x);

// Codebook CSV layout
// -------------------
//   line 1:  "# key=value key=value ..."   (geometry / partition metadata)
//   line 2:  "end,criterion,p,q,part,re0,im0,re1,im1,..."
//   data:    one row per codeword part; rows may differ in length.
//
// Parts:
//   single    the single-polarization panel codeword (length m_h*m_v)
//   dual      the dual-polarization port codeword (length 2*m_h*m_v)
//   analog<k> column k (1-based) of the analog beamformer, when hybrid
//   digital   the digital combining vector, when hybrid
struct CodebookCsvRow {
    LinkEnd end = LinkEnd::Tx;
    Criterion criterion = Criterion::SE;
    int p = 1;
    int q = 1;
    std::string part;
    Vec values;
};

using CsvMetadata = std::vector<std::pair<std::string, std::string>>;

// Expands a codeword into its CSV rows: the dual word itself, plus
// analog/digital rows when a hybrid factorization is attached.
std::vector<CodebookCsvRow> codeword_rows(const Codeword& w);

void write_codebook_csv(std::ostream& os, const CsvMetadata& metadata,
                        const std::vector<CodebookCsvRow>& rows);

// Writes to a file, throwing io_error when the stream cannot be opened
// or the write fails.
void write_codebook_csv_file(const std::string& path, const CsvMetadata& metadata,
                             const std::vector<CodebookCsvRow>& rows);

}  // namespace dpbeam
