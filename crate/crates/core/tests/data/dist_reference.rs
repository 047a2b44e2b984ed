use hsbench_core::dist::Dist;

// mpmath reference values (40-digit working precision): (dist, x, lower, upper)
#[allow(clippy::excessive_precision)]
pub const CASES: &[(Dist, f64, f64, f64)] = &[
    (Dist::StudentT { df: 1.0 }, -50.0, 6.3653491009727966793e-3, 9.9363465089902720332e-1),
    (Dist::StudentT { df: 1.0 }, -5.0, 6.2832958189001183814e-2, 9.3716704181099881619e-1),
    (Dist::StudentT { df: 1.0 }, -1.5, 1.8716704181099881619e-1, 8.1283295818900118381e-1),
    (Dist::StudentT { df: 1.0 }, -0.1, 4.6827448256944642874e-1, 5.3172551743055357126e-1),
    (Dist::StudentT { df: 1.0 }, 0.3, 5.9277357907774234032e-1, 4.0722642092225765968e-1),
    (Dist::StudentT { df: 1.0 }, 2.0, 8.5241638234956672582e-1, 1.4758361765043327418e-1),
    (Dist::StudentT { df: 1.0 }, 4.0, 9.2202086962263067454e-1, 7.7979130377369325461e-2),
    (Dist::StudentT { df: 1.0 }, 10.0, 9.6827448256944643049e-1, 3.1725517430553569515e-2),
    (Dist::StudentT { df: 2.5 }, -50.0, 4.0652475424793603904e-5, 9.999593475245752064e-1),
    (Dist::StudentT { df: 2.5 }, -5.0, 1.1725594985430923532e-2, 9.8827440501456907647e-1),
    (Dist::StudentT { df: 2.5 }, -1.5, 1.2391822654314813056e-1, 8.7608177345685186944e-1),
    (Dist::StudentT { df: 2.5 }, -0.1, 4.6390327203124478798e-1, 5.3609672796875521202e-1),
    (Dist::StudentT { df: 2.5 }, 0.3, 6.0632881425240139276e-1, 3.9367118574759860724e-1),
    (Dist::StudentT { df: 2.5 }, 2.0, 9.2130425212101700669e-1, 7.8695747878982993312e-2),
    (Dist::StudentT { df: 2.5 }, 4.0, 9.8049351207934087669e-1, 1.9506487920659123307e-2),
    (Dist::StudentT { df: 2.5 }, 10.0, 9.9777925211634628761e-1, 2.2207478836537123865e-3),
    (Dist::StudentT { df: 10.0 }, -50.0, 1.2371551646513399873e-13, 9.9999999999987628448e-1),
    (Dist::StudentT { df: 10.0 }, -5.0, 2.6866680137822630854e-4, 9.9973133319862177369e-1),
    (Dist::StudentT { df: 10.0 }, -1.5, 8.2253663222720090425e-2, 9.1774633677727990958e-1),
    (Dist::StudentT { df: 10.0 }, -0.1, 4.6116035928220415759e-1, 5.3883964071779584241e-1),
    (Dist::StudentT { df: 10.0 }, 0.3, 6.148396962171006936e-1, 3.851603037828993064e-1),
    (Dist::StudentT { df: 10.0 }, 2.0, 9.6330598261462981719e-1, 3.6694017385370182809e-2),
    (Dist::StudentT { df: 10.0 }, 4.0, 9.9874083368763165387e-1, 1.2591663123683461319e-3),
    (Dist::StudentT { df: 10.0 }, 10.0, 9.9999920522341220179e-1, 7.9477658779820597717e-7),
    (Dist::StudentT { df: 100.0 }, -50.0, 7.236081839880694376e-73, 1.0),
    (Dist::StudentT { df: 100.0 }, -5.0, 1.2250867067519002115e-6, 9.999987749132932481e-1),
    (Dist::StudentT { df: 100.0 }, -1.5, 6.8382529062344428399e-2, 9.316174709376555716e-1),
    (Dist::StudentT { df: 100.0 }, -0.1, 4.6027226554792561608e-1, 5.3972773445207438392e-1),
    (Dist::StudentT { df: 100.0 }, 0.3, 6.1760005984984825608e-1, 3.8239994015015174392e-1),
    (Dist::StudentT { df: 100.0 }, 2.0, 9.758939106344331602e-1, 2.41060893655668398e-2),
    (Dist::StudentT { df: 100.0 }, 4.0, 9.9993923817784961916e-1, 6.0761822150380838601e-5),
    (Dist::StudentT { df: 100.0 }, 10.0, 9.9999999999999995049e-1, 4.9508444922970695877e-17),
    (Dist::StudentT { df: 10000.0 }, -50.0, 2.5127290490168965811e-487, 1.0),
    (Dist::StudentT { df: 10000.0 }, -5.0, 2.9151633068313236453e-7, 9.9999970848366931687e-1),
    (Dist::StudentT { df: 10000.0 }, -1.5, 6.6822985911809806278e-2, 9.3317701408819019372e-1),
    (Dist::StudentT { df: 10000.0 }, -0.1, 4.6017316501553744693e-1, 5.3982683498446255307e-1),
    (Dist::StudentT { df: 10000.0 }, 0.3, 6.1790830438533385561e-1, 3.8209169561466614439e-1),
    (Dist::StudentT { df: 10000.0 }, 2.0, 9.7723636966928227863e-1, 2.2763630330717721369e-2),
    (Dist::StudentT { df: 10000.0 }, 4.0, 9.9996810066558843018e-1, 3.189933441156981553e-5),
    (Dist::StudentT { df: 10000.0 }, 10.0, 1.0, 9.81640371433191447e-24),
    (Dist::StudentT { df: 1000000.0 }, -50.0, 5.1482839195057938185e-545, 1.0),
    (Dist::StudentT { df: 1000000.0 }, -5.0, 2.8669989354453707845e-7, 9.9999971330010645546e-1),
    (Dist::StudentT { df: 1000000.0 }, -1.5, 6.6807359118396384618e-2, 9.3319264088160361538e-1),
    (Dist::StudentT { df: 1000000.0 }, -0.1, 4.6017217274602157868e-1, 5.3982782725397842132e-1),
    (Dist::StudentT { df: 1000000.0 }, 0.3, 6.1791139101050289599e-1, 3.8208860898949710401e-1),
    (Dist::StudentT { df: 1000000.0 }, 2.0, 9.7724973307434039579e-1, 2.2750266925659604211e-2),
    (Dist::StudentT { df: 1000000.0 }, 4.0, 9.9996832648299497595e-1, 3.167351700502405231e-5),
    (Dist::StudentT { df: 1000000.0 }, 10.0, 1.0, 7.6393053840891247767e-24),
    (Dist::ChiSquare { df: 1.0 }, 0.01, 7.9655674554057963757e-2, 9.2034432544594203624e-1),
    (Dist::ChiSquare { df: 1.0 }, 0.5, 5.2049987781304653768e-1, 4.7950012218695346232e-1),
    (Dist::ChiSquare { df: 1.0 }, 0.9, 6.5721828885208861339e-1, 3.4278171114791138661e-1),
    (Dist::ChiSquare { df: 1.0 }, 1.0, 6.8268949213708589717e-1, 3.1731050786291410283e-1),
    (Dist::ChiSquare { df: 1.0 }, 1.1, 7.0573389569503712909e-1, 2.9426610430496287091e-1),
    (Dist::ChiSquare { df: 1.0 }, 2.0, 8.4270079294971486934e-1, 1.5729920705028513066e-1),
    (Dist::ChiSquare { df: 1.0 }, 5.0, 9.7465268132253173607e-1, 2.5347318677468263932e-2),
    (Dist::ChiSquare { df: 3.0 }, 0.03, 1.3696051811913180435e-3, 9.9863039481880868196e-1),
    (Dist::ChiSquare { df: 3.0 }, 1.5, 3.1772966966378742868e-1, 6.8227033033621257132e-1),
    (Dist::ChiSquare { df: 3.0 }, 2.7, 5.5977270563976892763e-1, 4.4022729436023107237e-1),
    (Dist::ChiSquare { df: 3.0 }, 3.0, 6.0837482372891104452e-1, 3.9162517627108895548e-1),
    (Dist::ChiSquare { df: 3.0 }, 3.3000000000000003, 6.5235735526772547221e-1, 3.4764264473227452779e-1),
    (Dist::ChiSquare { df: 3.0 }, 6.0, 8.8838977490528744002e-1, 1.1161022509471255998e-1),
    (Dist::ChiSquare { df: 3.0 }, 15.0, 9.9818335103342767677e-1, 1.8166489665723232336e-3),
    (Dist::ChiSquare { df: 10.0 }, 0.1, 2.4979513360065101182e-9, 9.9999999750204866399e-1),
    (Dist::ChiSquare { df: 10.0 }, 5.0, 1.0882198108584875765e-1, 8.9117801891415124235e-1),
    (Dist::ChiSquare { df: 10.0 }, 9.0, 4.6789642362528454351e-1, 5.3210357637471545649e-1),
    (Dist::ChiSquare { df: 10.0 }, 10.0, 5.5950671493478758856e-1, 4.4049328506521241144e-1),
    (Dist::ChiSquare { df: 10.0 }, 11.0, 6.4248199757207454182e-1, 3.5751800242792545818e-1),
    (Dist::ChiSquare { df: 10.0 }, 20.0, 9.7074731192303892733e-1, 2.9252688076961072673e-2),
    (Dist::ChiSquare { df: 10.0 }, 50.0, 9.9999973309165750955e-1, 2.6690834249044956397e-7),
    (Dist::ChiSquare { df: 100.0 }, 1.0, 1.7887765104351381292e-80, 1.0),
    (Dist::ChiSquare { df: 100.0 }, 50.0, 6.9533052476160989688e-6, 9.999930466947523839e-1),
    (Dist::ChiSquare { df: 100.0 }, 90.0, 2.4680203440017032586e-1, 7.5319796559982967414e-1),
    (Dist::ChiSquare { df: 100.0 }, 100.0, 5.1880831547204328189e-1, 4.8119168452795671811e-1),
    (Dist::ChiSquare { df: 100.0 }, 110.00000000000001, 7.6779521949914384839e-1, 2.3220478050085615161e-1),
    (Dist::ChiSquare { df: 100.0 }, 200.0, 9.9999998821549927902e-1, 1.1784500720979422446e-8),
    (Dist::ChiSquare { df: 100.0 }, 500.0, 1.0, 1.7201210053695374613e-54),
    (Dist::ChiSquare { df: 10000.0 }, 8599.928573250636, 1.2514419171664491025e-25, 1.0),
    (Dist::ChiSquare { df: 10000.0 }, 9292.893218813453, 1.5421442986799819338e-7, 9.99999845785570132e-1),
    (Dist::ChiSquare { df: 10000.0 }, 9858.57864376269, 1.5864710626636246088e-1, 8.4135289373363753912e-1),
    (Dist::ChiSquare { df: 10000.0 }, 10000.0, 5.0188063403381735535e-1, 4.9811936596618264465e-1),
    (Dist::ChiSquare { df: 10000.0 }, 10141.42135623731, 8.4135273148802029323e-1, 1.5864726851197970677e-1),
    (Dist::ChiSquare { df: 10000.0 }, 11414.213562373096, 1.0, 5.4134031956143553751e-22),
    (Dist::ChiSquare { df: 10000.0 }, 15656.85424949238, 1.0, 1.414717135283977919e-257),
    (Dist::ChiSquare { df: 1000000.0 }, 985999.2857325063, 1.3111509680053117191e-23, 1.0),
    (Dist::ChiSquare { df: 1000000.0 }, 992928.9321881345, 2.7023027943305857618e-7, 9.9999972976972056694e-1),
    (Dist::ChiSquare { df: 1000000.0 }, 998585.7864376269, 1.5865517319335003635e-1, 8.4134482680664996365e-1),
    (Dist::ChiSquare { df: 1000000.0 }, 1000000.0, 5.0018806319660550048e-1, 4.9981193680339449952e-1),
    (Dist::ChiSquare { df: 1000000.0 }, 1001414.2135623731, 8.4134482664442271642e-1, 1.5865517335557728358e-1),
    (Dist::ChiSquare { df: 1000000.0 }, 1014142.135623731, 1.0, 1.2146988079789820442e-23),
    (Dist::ChiSquare { df: 1000000.0 }, 1056568.5424949238, 1.0, 1.3605784051845594258e-337),
    (Dist::F { df1: 1.0, df2: 1.0 }, 0.05, 1.4004869609310202646e-1, 8.5995130390689797354e-1),
    (Dist::F { df1: 1.0, df2: 1.0 }, 0.5, 3.9182655203060727017e-1, 6.0817344796939272983e-1),
    (Dist::F { df1: 1.0, df2: 1.0 }, 1.0, 5.0e-1, 5.0e-1),
    (Dist::F { df1: 1.0, df2: 1.0 }, 1.02, 5.0315163452520085857e-1, 4.9684836547479914143e-1),
    (Dist::F { df1: 1.0, df2: 1.0 }, 3.0, 6.6666666666666666667e-1, 3.3333333333333333333e-1),
    (Dist::F { df1: 1.0, df2: 1.0 }, 49.1, 9.0975633796356505219e-1, 9.0243662036434947812e-2),
    (Dist::F { df1: 1.0, df2: 312.0 }, 0.05, 1.7679038685115920595e-1, 8.2320961314884079405e-1),
    (Dist::F { df1: 1.0, df2: 312.0 }, 0.5, 5.199720870596288147e-1, 4.800279129403711853e-1),
    (Dist::F { df1: 1.0, df2: 312.0 }, 1.0, 6.8191456670687082738e-1, 3.1808543329312917262e-1),
    (Dist::F { df1: 1.0, df2: 312.0 }, 1.02, 6.8669839749042248749e-1, 3.1330160250957751251e-1),
    (Dist::F { df1: 1.0, df2: 312.0 }, 3.0, 9.1574715419841977455e-1, 8.425284580158022545e-2),
    (Dist::F { df1: 1.0, df2: 312.0 }, 49.1, 9.9999999998494674068e-1, 1.5053259321340948947e-11),
    (Dist::F { df1: 3.0, df2: 20.0 }, 0.05, 1.5219974521200140927e-2, 9.8478002547879985907e-1),
    (Dist::F { df1: 3.0, df2: 20.0 }, 0.5, 3.1348138716359701718e-1, 6.8651861283640298282e-1),
    (Dist::F { df1: 3.0, df2: 20.0 }, 1.0, 5.8674808593753998207e-1, 4.1325191406246001793e-1),
    (Dist::F { df1: 3.0, df2: 20.0 }, 1.02, 5.952793878884992483e-1, 4.047206121115007517e-1),
    (Dist::F { df1: 3.0, df2: 20.0 }, 3.0, 9.4514138133170492765e-1, 5.4858618668295072347e-2),
    (Dist::F { df1: 3.0, df2: 20.0 }, 49.1, 9.9999999791757610395e-1, 2.0824238960473259319e-9),
    (Dist::F { df1: 5.0, df2: 1000000.0 }, 0.05, 1.5208235959716084332e-3, 9.9847917640402839157e-1),
    (Dist::F { df1: 5.0, df2: 1000000.0 }, 0.5, 2.2350502300255775582e-1, 7.7649497699744224418e-1),
    (Dist::F { df1: 5.0, df2: 1000000.0 }, 1.0, 5.8411920279846169696e-1, 4.1588079720153830304e-1),
    (Dist::F { df1: 5.0, df2: 1000000.0 }, 1.02, 5.9620090249555687153e-1, 4.0379909750444312847e-1),
    (Dist::F { df1: 5.0, df2: 1000000.0 }, 3.0, 9.8963727752519851001e-1, 1.036272247480148999e-2),
    (Dist::F { df1: 5.0, df2: 1000000.0 }, 49.1, 1.0, 5.1514437436911587022e-51),
    (Dist::F { df1: 10000.0, df2: 10000.0 }, 0.05, 7.9678821315469347197e-3710, 1.0),
    (Dist::F { df1: 10000.0, df2: 10000.0 }, 0.5, 2.0656728995851408846e-258, 1.0),
    (Dist::F { df1: 10000.0, df2: 10000.0 }, 1.0, 5.0e-1, 5.0e-1),
    (Dist::F { df1: 10000.0, df2: 10000.0 }, 1.02, 8.3893701747659807864e-1, 1.6106298252340192136e-1),
    (Dist::F { df1: 10000.0, df2: 10000.0 }, 3.0, 1.0, 1.6147898013506946189e-627),
    (Dist::F { df1: 10000.0, df2: 10000.0 }, 49.1, 1.0, 8.8868275821630722449e-5536),
    (Dist::F { df1: 2.0, df2: 7.5 }, 0.05, 4.8456237669062876274e-2, 9.5154376233093712373e-1),
    (Dist::F { df1: 2.0, df2: 7.5 }, 0.5, 3.7459871925399025061e-1, 6.2540128074600974939e-1),
    (Dist::F { df1: 2.0, df2: 7.5 }, 1.0, 5.8788709163218909057e-1, 4.1211290836781090943e-1),
    (Dist::F { df1: 2.0, df2: 7.5 }, 1.02, 5.9432958851760714026e-1, 4.0567041148239285974e-1),
    (Dist::F { df1: 2.0, df2: 7.5 }, 3.0, 8.8966123825557564992e-1, 1.1033876174442435008e-1),
    (Dist::F { df1: 2.0, df2: 7.5 }, 49.1, 9.9995088676567288368e-1, 4.9113234327116317695e-5),
    (Dist::Normal, -37.0, 5.7255712225245768227e-300, 1.0),
    (Dist::Normal, -20.0, 2.7536241186062336951e-89, 1.0),
    (Dist::Normal, -8.0, 6.2209605742717841235e-16, 9.999999999999993779e-1),
    (Dist::Normal, -1.96, 2.4997895148220436213e-2, 9.7500210485177956379e-1),
    (Dist::Normal, -0.001, 4.9960105778608893741e-1, 5.0039894221391106259e-1),
    (Dist::Normal, 0.0, 5.0e-1, 5.0e-1),
    (Dist::Normal, 0.7, 7.5803634777692697138e-1, 2.4196365222307302862e-1),
    (Dist::Normal, 3.0, 9.9865010196836990547e-1, 1.3498980316300945267e-3),
    (Dist::Normal, 9.0, 9.9999999999999999989e-1, 1.1285884059538406477e-19),
    (Dist::Beta { a: 0.5, b: 0.5 }, 0.0001, 6.3663038317461406975e-3, 9.936336961682538593e-1),
    (Dist::Beta { a: 0.5, b: 0.5 }, 0.2, 2.9516723530086655719e-1, 7.0483276469913344281e-1),
    (Dist::Beta { a: 0.5, b: 0.5 }, 0.25, 3.3333333333333333333e-1, 6.6666666666666666667e-1),
    (Dist::Beta { a: 0.5, b: 0.5 }, 0.5, 5.0e-1, 5.0e-1),
    (Dist::Beta { a: 0.5, b: 0.5 }, 0.9, 7.9516723530086657191e-1, 2.0483276469913342809e-1),
    (Dist::Beta { a: 2.0, b: 3.0 }, 0.0001, 5.9992000300000005749e-8, 9.999999400079997e-1),
    (Dist::Beta { a: 2.0, b: 3.0 }, 0.2, 1.8080000000000001705e-1, 8.1919999999999998295e-1),
    (Dist::Beta { a: 2.0, b: 3.0 }, 0.25, 2.6171875e-1, 7.3828125e-1),
    (Dist::Beta { a: 2.0, b: 3.0 }, 0.5, 6.875e-1, 3.125e-1),
    (Dist::Beta { a: 2.0, b: 3.0 }, 0.9, 9.963000000000000024e-1, 3.6999999999999976019e-3),
    (Dist::Beta { a: 50.0, b: 80.0 }, 0.0001, 1.814150791344210005e-164, 1.0),
    (Dist::Beta { a: 50.0, b: 80.0 }, 0.2, 7.3337075455171810884e-7, 9.9999926662924544828e-1),
    (Dist::Beta { a: 50.0, b: 80.0 }, 0.25, 3.8994008247166217576e-4, 9.9961005991752833782e-1),
    (Dist::Beta { a: 50.0, b: 80.0 }, 0.5, 9.9599616339595456855e-1, 4.0038366040454314481e-3),
    (Dist::Beta { a: 50.0, b: 80.0 }, 0.9, 1.0, 7.0136859827457821938e-47),
    (Dist::Beta { a: 100000.0, b: 300000.0 }, 0.0001, 4.2583700650441419863e-302329, 1.0),
    (Dist::Beta { a: 100000.0, b: 300000.0 }, 0.2, 1.9157478069094679026e-1285, 1.0),
    (Dist::Beta { a: 100000.0, b: 300000.0 }, 0.25, 5.0024278863567284984e-1, 4.9975721136432715016e-1),
    (Dist::Beta { a: 100000.0, b: 300000.0 }, 0.5, 1.0, 4.4910930157087428902e-22728),
    (Dist::Beta { a: 100000.0, b: 300000.0 }, 0.9, 1.0, 2.3890046537366104478e-206892),
    (Dist::Beta { a: 0.1, b: 9.0 }, 0.0001, 5.1861945601733821156e-1, 4.8138054398266178844e-1),
    (Dist::Beta { a: 0.1, b: 9.0 }, 0.2, 9.9360013606586079422e-1, 6.3998639341392057801e-3),
    (Dist::Beta { a: 0.1, b: 9.0 }, 0.25, 9.9691727874689949388e-1, 3.0827212531005061243e-3),
    (Dist::Beta { a: 0.1, b: 9.0 }, 0.5, 9.9995132312739293521e-1, 4.8676872607064792847e-5),
    (Dist::Beta { a: 0.1, b: 9.0 }, 0.9, 9.9999999998424070418e-1, 1.5759295821729465061e-11),
];
