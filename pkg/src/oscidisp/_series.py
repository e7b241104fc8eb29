"""Exact Taylor coefficients of the dimensionless dispersivity in powers of omega**2.

Generated by tools/derive_series.py from the cell problem (not from the
closed forms).  Entry m of each tuple is the coefficient of omega**(2m) as a
(numerator, denominator) pair.
"""

# fmt: off
SERIES = {
    'shear': (
        (1, 60),
        (-31, 45360),
        (5461, 194594400),
        (-3202291, 2778808032000),
        (4722116521, 99786996429120000),
        (-14717667114151, 7573833028970208000000),
        (86125672563201181, 1079316649626428461248000000),
        (-868320396104950823611, 264993823816280715805608960000000),
        (14129659550745551130667441, 105009102563677559252288662579200000000),
        (-352552873457246307069012458671, 63805630899741758552875637156373504000000000),
    ),
    'poiseuille': (
        (1, 3780),
        (-1, 1496880),
        (1, 583783200),
        (-43867, 9978699642912000),
        (77683, 6885302753609280000),
        (-657931, 22721499086910624000000),
        (1723168255201, 23186959583924562632990784000000),
        (-151628697551, 794981471448842147416826880000000),
        (154210205991661, 315027307691032677756865987737600000000),
        (-1520097643918070802691, 1209946178751802967438180707396310756352000000000),
    ),
    'power1': (
        (1, 960),
        (-31, 11612160),
        (5461, 797058662400),
        (-3202291, 182111963185152000),
        (4722116521, 104634249567660933120000),
        (-14717667114151, 127067832674967437180928000000),
        (86125672563201181, 289726857010862553646485209088000000),
        (-868320396104950823611, 1138139806932911586740560776564572160000000),
        (14129659550745551130667441, 7216170580692877991642912302867888157491200000000),
        (-352552873457246307069012458671, 70155033091849704404513061975497379236076847104000000000),
    ),
    'power2': (
        (1, 3780),
        (-1, 1496880),
        (1, 583783200),
        (-43867, 9978699642912000),
        (77683, 6885302753609280000),
        (-657931, 22721499086910624000000),
        (1723168255201, 23186959583924562632990784000000),
        (-151628697551, 794981471448842147416826880000000),
        (154210205991661, 315027307691032677756865987737600000000),
        (-1520097643918070802691, 1209946178751802967438180707396310756352000000000),
    ),
    'power3': (
        (1, 18432),
        (-67, 503193600),
        (265253, 778256252928000),
        (-7870033, 8998473475031040000),
        (229645459427, 102309044021712912384000000),
        (-244015117540091, 42357727633167040006796083200000),
        (142730195537168243, 9653644025351796243204050780160000000),
        (-7606228838228408633615017, 200449182797024388656747563968552448819200000000),
        (110308066227243351861732043, 1132665457261288779174546513860592515678208000000000),
        (-1728905033353215616892183965871, 6917115153019571464762050074047515989313186693120000000000),
    ),
    'power4': (
        (1, 92400),
        (-1, 38808000),
        (61, 926424135000),
        (-42651883, 252461100965673600000),
        (298836817, 689218805636288928000000),
        (-329533134809, 296129752029687900804480000000),
        (11850226666147, 4149245399228605944850982400000000),
        (-32698330817382709, 4460951801783746927449805837824000000000),
        (86991403726187575819, 4624212343224874102501559231936424960000000000),
        (-13892919369327537037688417, 287749400230753781716148135832990624075632640000000000),
    ),
    'power5': (
        (25, 11501568),
        (-305, 60643344384),
        (355273, 27687610692403200),
        (-21328519, 647890090202234880000),
        (90963071079019, 1076651270943376267731271680000),
        (-1067557849064504309, 4923358452929416084034065897881600000),
        (17174226569469879601, 30860769220244622230274709534015488000000),
        (-63956973899797053752528653, 44779263927759048294086828776715327593512960000000),
        (438585965068278562902166276469, 119647397241419614525613839118659736031363229286400000000),
        (-55975275610651702444568395842457, 5949825770021314591129724991692711353367630665954099200000000),
    ),
    'power6': (
        (1, 2257920),
        (-421, 421625917440),
        (48077, 18897673054740480),
        (-5562929, 852367218564685824000),
        (27131978789, 1619855053837609030041600000),
        (-1554796562981, 36168332655641468307804979200000),
        (12030765367391539, 109045488488047147115439698257920000000),
        (-7262663214548653720223, 25648964463753968355208648539807370444800000000),
        (1729099669155765886247857, 2379323206042408530986237815673307485896704000000000),
        (-6740471498984227215788287, 3613958586155926594264848537831748749273858048000000000),
    ),
}
