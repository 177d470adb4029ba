#include "blockquant/reference_tables.hpp"

namespace blockquant {

// Published 5000-replicate results for r = 1, alpha = 0.05, a_n = 19/12.
// Scheme 2 uses v = 1/2 for Frechet(1) and Burr(0.5,1), v = 1/4 for Burr(1,0.5).
// Note: the Burr(1,0.5) length column of Table 4 repeats Table 2 verbatim.
const std::array<ReferenceTable, 4>& reference_tables() {
  static const std::array<ReferenceTable, 4> tables{{
    // Table 1: coverage, m = floor(1000/k).
    ReferenceTable{1, 1, true, {{
         {10, {0.9630, 0.8996, 0.9602, 0.9046, 0.9612, 0.9066}},
         {15, {0.9420, 0.9172, 0.9342, 0.9114, 0.9354, 0.9186}},
         {20, {0.9372, 0.9256, 0.9360, 0.9234, 0.9384, 0.9286}},
         {25, {0.9408, 0.9294, 0.9410, 0.9308, 0.9438, 0.9394}},
         {30, {0.9440, 0.9364, 0.9406, 0.9248, 0.9448, 0.9348}},
         {35, {0.9438, 0.9412, 0.9494, 0.9388, 0.9524, 0.9520}},
         {40, {0.9448, 0.9490, 0.9442, 0.9384, 0.9434, 0.9522}},
         {45, {0.9490, 0.9498, 0.9430, 0.9370, 0.9440, 0.9506}},
         {50, {0.9490, 0.9510, 0.9462, 0.9446, 0.9440, 0.9582}},
         {55, {0.9446, 0.9482, 0.9374, 0.9358, 0.9364, 0.9488}},
         {60, {0.9484, 0.9534, 0.9460, 0.9418, 0.9418, 0.9574}},
         {65, {0.9498, 0.9600, 0.9470, 0.9452, 0.9414, 0.9576}},
         {70, {0.9464, 0.9566, 0.9488, 0.9438, 0.9348, 0.9592}},
         {75, {0.9494, 0.9610, 0.9470, 0.9472, 0.9300, 0.9602}},
         {80, {0.9458, 0.9572, 0.9420, 0.9434, 0.9258, 0.9548}},
         {85, {0.9436, 0.9570, 0.9458, 0.9454, 0.9146, 0.9534}},
         {90, {0.9498, 0.9616, 0.9446, 0.9464, 0.9192, 0.9510}},
         {95, {0.9408, 0.9580, 0.9468, 0.9490, 0.9044, 0.9492}},
         {100, {0.9384, 0.9538, 0.9462, 0.9502, 0.8988, 0.9438}},
    }}},
    // Table 2: mean lengths, m = floor(1000/k).
    ReferenceTable{2, 1, false, {{
         {10, {5.014, 3.393, 9.985, 6.754, 10.052, 6.834}},
         {15, {3.622, 3.193, 7.163, 6.343, 7.184, 6.373}},
         {20, {3.284, 3.015, 6.525, 5.979, 6.550, 6.027}},
         {25, {3.082, 2.875, 6.159, 5.702, 6.170, 5.761}},
         {30, {2.946, 2.780, 5.846, 5.470, 5.854, 5.526}},
         {35, {2.818, 2.683, 5.605, 5.276, 5.608, 5.317}},
         {40, {2.702, 2.588, 5.386, 5.095, 5.392, 5.126}},
         {45, {2.623, 2.524, 5.199, 4.937, 5.216, 4.979}},
         {50, {2.537, 2.451, 5.040, 4.801, 5.060, 4.841}},
         {55, {2.471, 2.401, 4.895, 4.682, 4.909, 4.707}},
         {60, {2.429, 2.369, 4.806, 4.609, 4.784, 4.594}},
         {65, {2.363, 2.315, 4.670, 4.494, 4.672, 4.489}},
         {70, {2.307, 2.265, 4.560, 4.396, 4.564, 4.399}},
         {75, {2.263, 2.228, 4.468, 4.321, 4.466, 4.316}},
         {80, {2.228, 2.201, 4.393, 4.259, 4.380, 4.233}},
         {85, {2.199, 2.181, 4.322, 4.204, 4.294, 4.160}},
         {90, {2.135, 2.119, 4.198, 4.086, 4.219, 4.092}},
         {95, {2.118, 2.111, 4.165, 4.070, 4.145, 4.023}},
         {100, {2.062, 2.057, 4.056, 3.967, 4.079, 3.962}},
    }}},
    // Table 3: coverage, m = floor(50 k^v).
    ReferenceTable{3, 2, true, {{
         {10, {0.9648, 0.9020, 0.9578, 0.8966, 0.9604, 0.9036}},
         {15, {0.9416, 0.9180, 0.9378, 0.9148, 0.9402, 0.9166}},
         {20, {0.9366, 0.9216, 0.9388, 0.9248, 0.9370, 0.9216}},
         {25, {0.9422, 0.9286, 0.9360, 0.9294, 0.9398, 0.9312}},
         {30, {0.9422, 0.9284, 0.9386, 0.9306, 0.9410, 0.9356}},
         {35, {0.9410, 0.9350, 0.9388, 0.9294, 0.9392, 0.9340}},
         {40, {0.9456, 0.9366, 0.9418, 0.9332, 0.9406, 0.9384}},
         {45, {0.9470, 0.9392, 0.9434, 0.9368, 0.9462, 0.9440}},
         {50, {0.9472, 0.9390, 0.9436, 0.9346, 0.9462, 0.9386}},
         {55, {0.9440, 0.9356, 0.9460, 0.9394, 0.9422, 0.9362}},
         {60, {0.9464, 0.9398, 0.9456, 0.9324, 0.9448, 0.9414}},
         {65, {0.9480, 0.9418, 0.9434, 0.9322, 0.9416, 0.9356}},
         {70, {0.9492, 0.9448, 0.9458, 0.9390, 0.9456, 0.9402}},
         {75, {0.9464, 0.9418, 0.9460, 0.9406, 0.9480, 0.9440}},
         {80, {0.9474, 0.9452, 0.9474, 0.9432, 0.9510, 0.9480}},
         {85, {0.9536, 0.9448, 0.9488, 0.9396, 0.9486, 0.9448}},
         {90, {0.9448, 0.9434, 0.9442, 0.9356, 0.9524, 0.9508}},
         {95, {0.9500, 0.9436, 0.9508, 0.9458, 0.9518, 0.9484}},
         {100, {0.9464, 0.9374, 0.9468, 0.9402, 0.9478, 0.9440}},
    }}},
    // Table 4: mean lengths, m = floor(50 k^v).
    ReferenceTable{4, 2, false, {{
         {10, {5.008, 3.386, 9.933, 6.701, 10.052, 6.834}},
         {15, {3.591, 3.172, 7.160, 6.311, 7.184, 6.373}},
         {20, {3.280, 2.994, 6.529, 5.986, 6.550, 6.027}},
         {25, {3.078, 2.856, 6.141, 5.700, 6.170, 5.761}},
         {30, {2.919, 2.733, 5.832, 5.469, 5.854, 5.526}},
         {35, {2.798, 2.637, 5.586, 5.271, 5.608, 5.317}},
         {40, {2.690, 2.547, 5.376, 5.090, 5.392, 5.126}},
         {45, {2.603, 2.475, 5.186, 4.935, 5.216, 4.979}},
         {50, {2.524, 2.404, 5.032, 4.800, 5.060, 4.841}},
         {55, {2.452, 2.343, 4.895, 4.676, 4.909, 4.707}},
         {60, {2.395, 2.293, 4.768, 4.557, 4.784, 4.594}},
         {65, {2.333, 2.238, 4.652, 4.463, 4.672, 4.489}},
         {70, {2.280, 2.192, 4.544, 4.375, 4.564, 4.399}},
         {75, {2.235, 2.149, 4.449, 4.287, 4.466, 4.316}},
         {80, {2.190, 2.109, 4.356, 4.204, 4.380, 4.233}},
         {85, {2.150, 2.073, 4.274, 4.127, 4.294, 4.160}},
         {90, {2.110, 2.036, 4.201, 4.057, 4.219, 4.092}},
         {95, {2.071, 2.001, 4.126, 3.989, 4.145, 4.023}},
         {100, {2.037, 1.970, 4.059, 3.936, 4.079, 3.962}},
    }}},
  }};
  return tables;
}

std::optional<double> reference_value(int scheme, bool coverage, const HeavyTailModel& model, CiMethod method,
                                      std::size_t k) {
  int column = -1;
  if (model == HeavyTailModel::frechet(1.0)) {
    column = 0;
  } else if (model == HeavyTailModel::burr(0.5, 1.0)) {
    column = 2;
  } else if (model == HeavyTailModel::burr(1.0, 0.5)) {
    column = 4;
  }
  if (column < 0 || method == CiMethod::EL) return std::nullopt;
  if (method == CiMethod::Normal) ++column;
  for (const auto& table : reference_tables()) {
    if (table.scheme != scheme || table.coverage != coverage) continue;
    for (const auto& row : table.rows) {
      if (row.k == k) return row.values[static_cast<std::size_t>(column)];
    }
  }
  return std::nullopt;
}

}  // namespace blockquant
