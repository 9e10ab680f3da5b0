#pragma once

// Published coefficient tables for delta in [0.1, 0.2] at accuracy 1e-8,
// indexed [m][n] (m: delta direction, n: u direction).

#include <vector>

namespace appendix {

inline const std::vector<std::vector<double>> kFirst = {
    {0.0015173224201204, 0.0028185551650815, 0.0022599358279589, 0.0015680342698270, 0.0009459043966500, 0.0005000148204097, 0.0002342786936571, 0.0000986660876581, 0.0000378469221872, 0.0000133301455983, 0.0000043196173257, 0.0000012906319703, 0.0000003609030015, 0.0000000998616155},
    {0.0002528722215717, 0.0004053700919312, 0.0001678268383677, -0.0000700741494637, -0.0002038468732949, -0.0002183501508953, -0.0001632918130127, -0.0000957800587457, -0.0000462238395762, -0.0000188923951304, -0.0000067083849095, -0.0000020933533018, -0.0000005962987155, -0.0000001639159899},
    {-0.0000114009960766, -0.0000259448708964, -0.0000289961611465, -0.0000215492684447, -0.0000031908343145, 0.0000155516275132, 0.0000245736522666, 0.0000226176037315, 0.0000151912638058, 0.0000079916328208, 0.0000034157501336, 0.0000012177333308, 0.0000003726832304, 0.0000001012588862},
    {0.0000009598467591, 0.0000020896532161, 0.0000026001630603, 0.0000030696202825, 0.0000025977096176, 0.0000007618438592, -0.0000015917811532, -0.0000030850135229, -0.0000031377435380, -0.0000022459349254, -0.0000012247484604, -0.0000005277189063, -0.0000001871835099, -0.0000000544287724},
    {-0.0000001024227037, -0.0000002151292692, -0.0000002531116714, -0.0000003242049038, -0.0000003843685990, -0.0000003286102337, -0.0000000962454381, 0.0000002177742833, 0.0000004295129270, 0.0000004469913959, 0.0000003229989112, 0.0000001662032187, 0.0000000742134452, 0.0000000250134666},
    {0.0000000122727754, 0.0000000253707092, 0.0000000283544586, 0.0000000349527349, 0.0000000452799900, 0.0000000524580734, 0.0000000424043844, 0.0000000100802685, -0.0000000360000115, -0.0000000647989030, -0.0000000647743390, -0.0000000454779202, -0.0000000243260099, -0.0000000097375780},
};

inline const std::vector<std::vector<double>> kMiddle = {
    {0.3875945631074440, 0.4956109866348150, 0.1197964723594020, -0.0010763253182188, -0.0023865415596642, 0.0004865330909205, -0.0000106448822976, -0.0000205224390034, 0.0000062842657989, -0.0000007508885322, -0.0000001157724046, 0.0000000777284278},
    {0.0026135656106857, 0.0008953566937339, -0.0027935601066155, -0.0009194311880306, 0.0001990751020187, 0.0000201874711514, -0.0000192517056677, 0.0000042306504504, 0.0000000655856784, -0.0000003315298971, 0.0000001086938654, -0.0000000140930457},
    {0.0000129352935356, -0.0000067054601666, -0.0000166388049599, 0.0000085829238628, 0.0000035794963500, -0.0000020552522115, 0.0000002053193871, 0.0000001643278424, -0.0000000840329782, 0.0000000156952882, 0.0000000020326053, -0.0000000022683390},
    {-0.0000000381872506, -0.0000000125588670, 0.0000000730650209, 0.0000001335013439, -0.0000000521728813, -0.0000000169016304, 0.0000000182461114, -0.0000000050681230, -0.0000000005964520, 0.0000000010012989, -0.0000000003785164, 0.0000000000505659},
};

inline const std::vector<std::vector<double>> kTail = {
    {6.8753214515317200, 8.5433821730433800, 3.4476658871478400, 0.9330390647038300, 0.1741822695325730, 0.0231441815282366, 0.0027835177479455, 0.0004380896611385, 0.0000474342757583, -0.0000039453038556, -0.0000006163799253, 0.0000004418045229, 0.0000000377188891, -0.0000000336347029},
    {0.0154069212636548, 0.0090024260671873, -0.0130690823892008, -0.0087472864187297, -0.0023271850423403, -0.0002445078701620, -0.0000075113568411, -0.0000109856591271, -0.0000033230341686, 0.0000003821206797, 0.0000001912780830, -0.0000000406903687, -0.0000000175539467, 0.0000000003271218},
    {-0.0000209599465735, -0.0000377801621097, 0.0000022840388153, 0.0000347919528143, 0.0000189337983037, 0.0000029857164456, -0.0000003271927323, 0.0000000145476511, 0.0000000850337842, -0.0000000061400030, -0.0000000172232771, -0.0000000104246286, -0.0000000096591111, -0.0000000102016363},
    {-0.0000000864515313, -0.0000000303548005, 0.0000000362919660, 0.0000000562970750, -0.0000000495179004, -0.0000000266197129, 0.0000000028475004, 0.0000000029205683, -0.0000000002011847, -0.0000000040928856, 0.0000000086484494, 0.0000000086001421, 0.0000000085524035, 0.0000000085537387},
};

}  // namespace appendix
