#pragma once

namespace figsim::mc {

// Corner numbering follows the classic convention:
//   0:(0,0,0) 1:(1,0,0) 2:(1,1,0) 3:(0,1,0)
//   4:(0,0,1) 5:(1,0,1) 6:(1,1,1) 7:(0,1,1)
// Edge e connects kEdgeCorners[e][0] to kEdgeCorners[e][1].
extern const int kEdgeTable[256];
extern const int kTriTable[256][16];

inline constexpr int kEdgeCorners[12][2] = {
    {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
    {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7},
};

}  // namespace figsim::mc
