#include "ftv/wavelet.hpp"

#include <stdexcept>
#include <string>

#include "ftv/grid.hpp"

namespace ftv {

namespace {

// Minimum-phase Daubechies lowpass filters, computed by spectral
// factorization in 60-digit arithmetic and rounded.
const std::vector<std::vector<double>>& filter_table() {
    static const std::vector<std::vector<double>> table = {
        // S = 1
        {0.707106781186547524401, 0.707106781186547524401},
        // S = 2
        {0.482962913144534143375, 0.836516303737807905575, 0.224143868042013381026, -0.129409522551260381174},
        // S = 3
        {0.332670552950082615999, 0.806891509311092576494, 0.459877502118491570095, -0.135011020010254588696, -0.0854412738820266616928, 0.0352262918857095366027},
        // S = 4
        {0.230377813308896500863, 0.71484657055291564709, 0.630880767929858907882, -0.0279837694168598542114, -0.18703481171909308408, 0.0308413818355607636272, 0.0328830116668851997354, -0.0105974017850690321049},
        // S = 5
        {0.160102397974192914481, 0.60382926979718967054, 0.724308528437772927728, 0.138428145901320731505, -0.242294887066382031863, -0.0322448695846383746485, 0.0775714938400457135231, -0.00624149021279827427419, -0.0125807519990819994685, 0.003335725285473771278},
        // S = 6
        {0.111540743350109463621, 0.494623890398453085677, 0.751133908021095350679, 0.315250351709197629086, -0.226264693965439820076, -0.129766867567261935562, 0.0975016055873230491023, 0.0275228655303057286255, -0.0315820393174860295651, 0.000553842201161496139252, 0.00477725751094551063964, -0.00107730108530847956485},
        // S = 7
        {0.07785205408500917902, 0.396539319481917306539, 0.729132090846235119917, 0.469782287405193122472, -0.143906003928564975405, -0.224036184993874982638, 0.0713092192668302647509, 0.0806126091510830719129, -0.0380299369350144135796, -0.0165745416306668806541, 0.012550998556099840613, 0.000429577972921366521132, -0.00180164070404749091527, 0.000353713799974520248446},
        // S = 8
        {0.054415842243104009955, 0.312871590914299970659, 0.675630736297289806808, 0.585354683654206712771, -0.0158291052563493056674, -0.284015542961546926516, 0.000472484573913282770361, 0.128747426620478458857, -0.0173693010018075461696, -0.0440882539307947515068, 0.0139810279173982816487, 0.00874609404740577671638, -0.00487035299345157431042, -0.000391740373376947046298, 0.00067544940645056936637, -0.000117476784124769533731},
        // S = 9
        {0.0380779473638783465887, 0.243834674612590353732, 0.604823123690111111903, 0.657288078051300538078, 0.133197385825007576191, -0.293273783279174908806, -0.0968407832229764605135, 0.148540749338106380135, 0.0307256814793333792123, -0.0676328290613299736756, 0.000250947114831451957587, 0.0223616621236790972054, -0.00472320475775139727793, -0.0042815036824634298345, 0.00184764688305622647662, 0.000230385763523195967205, -0.000251963188942710136975, 0.0000393473203162715994807},
        // S = 10
        {0.0266700579005555535866, 0.188176800077691489021, 0.527201188931725586482, 0.688459039453603565742, 0.281172343660577460749, -0.249846424327315379416, -0.195946274377377043504, 0.127369340335793260083, 0.0930573646035723511604, -0.0713941471663970871453, -0.0294575368218758128583, 0.0332126740593410017398, 0.00360655356695616965542, -0.0107331754833305750443, 0.00139535174705290116579, 0.00199240529518505611716, -0.000685856694959711626561, -0.000116466855129285450951, 0.0000935886703200695913341, -0.0000132642028945212448124},
    };
    return table;
}

} // namespace

std::span<const double> daubechies_filter(int vanishing_moments) {
    const auto& table = filter_table();
    if (vanishing_moments < 1 || vanishing_moments > static_cast<int>(table.size())) {
        throw std::invalid_argument("Daubechies filters available for 1..10 vanishing moments, got " +
                                    std::to_string(vanishing_moments));
    }
    return table[vanishing_moments - 1];
}

PeriodicDwt::PeriodicDwt(int dim, int side, int vanishing_moments)
    : dim_(dim), side_(side), levels_(log2_exact(side)), size_(ipow(side, dim)) {
    const auto h = daubechies_filter(vanishing_moments);
    const std::size_t len = h.size();
    low_.assign(h.begin(), h.end());
    high_.resize(len);
    for (std::size_t t = 0; t < len; ++t) {
        const double sign = (t % 2 == 0) ? 1.0 : -1.0;
        high_[t] = sign * h[len - 1 - t];
    }
}

void PeriodicDwt::analysis_step(std::span<double> line, int m, std::vector<double>& scratch) const {
    const int half = m / 2;
    const int len = static_cast<int>(low_.size());
    scratch.assign(static_cast<std::size_t>(m), 0.0);
    for (int k = 0; k < half; ++k) {
        double lo = 0.0;
        double hi = 0.0;
        for (int t = 0; t < len; ++t) {
            const double x = line[static_cast<std::size_t>((2 * k + t) % m)];
            lo += low_[t] * x;
            hi += high_[t] * x;
        }
        scratch[k] = lo;
        scratch[half + k] = hi;
    }
    for (int i = 0; i < m; ++i) {
        line[i] = scratch[i];
    }
}

void PeriodicDwt::synthesis_step(std::span<double> line, int m, std::vector<double>& scratch) const {
    const int half = m / 2;
    const int len = static_cast<int>(low_.size());
    scratch.assign(static_cast<std::size_t>(m), 0.0);
    for (int k = 0; k < half; ++k) {
        const double lo = line[k];
        const double hi = line[half + k];
        for (int t = 0; t < len; ++t) {
            scratch[static_cast<std::size_t>((2 * k + t) % m)] += low_[t] * lo + high_[t] * hi;
        }
    }
    for (int i = 0; i < m; ++i) {
        line[i] = scratch[i];
    }
}

void PeriodicDwt::transform_block(std::span<double> data, int block, bool inverse) const {
    std::vector<double> line(static_cast<std::size_t>(block));
    std::vector<double> scratch;
    for (int step = 0; step < dim_; ++step) {
        const int axis = inverse ? dim_ - 1 - step : step;
        const std::size_t stride = ipow(side_, dim_ - 1 - axis);
        // Enumerate the base points of all lines along this axis inside [0, block)^d.
        std::array<int, 3> coord{0, 0, 0};
        const std::size_t lines = ipow(block, dim_ - 1);
        for (std::size_t l = 0; l < lines; ++l) {
            std::size_t rem = l;
            std::size_t base = 0;
            for (int b = dim_ - 1; b >= 0; --b) {
                if (b == axis) {
                    continue;
                }
                coord[b] = static_cast<int>(rem % block);
                rem /= block;
                base += static_cast<std::size_t>(coord[b]) * ipow(side_, dim_ - 1 - b);
            }
            for (int i = 0; i < block; ++i) {
                line[i] = data[base + i * stride];
            }
            if (inverse) {
                synthesis_step(line, block, scratch);
            } else {
                analysis_step(line, block, scratch);
            }
            for (int i = 0; i < block; ++i) {
                data[base + i * stride] = line[i];
            }
        }
    }
}

void PeriodicDwt::forward(std::span<double> data) const {
    if (data.size() != size_) {
        throw std::invalid_argument("DWT input has wrong length");
    }
    for (int block = side_; block >= 2; block /= 2) {
        transform_block(data, block, false);
    }
}

void PeriodicDwt::inverse(std::span<double> data) const {
    if (data.size() != size_) {
        throw std::invalid_argument("DWT input has wrong length");
    }
    for (int block = 2; block <= side_; block *= 2) {
        transform_block(data, block, true);
    }
}

std::size_t PeriodicDwt::flat_index(int scale, const std::array<int, 3>& position, int type) const {
    std::size_t flat = 0;
    const int width = 1 << scale;
    for (int a = 0; a < dim_; ++a) {
        const int e = (type >> (dim_ - 1 - a)) & 1;
        const int c = e * width + position[a];
        flat += static_cast<std::size_t>(c) * ipow(side_, dim_ - 1 - a);
    }
    return flat;
}

} // namespace ftv
