//! Clause templates for the synthetic generator. Paragraphs are separated
//! by blank lines; a single newline inside a paragraph is a line break.

use crate::labels::ClauseLabel;

pub(super) struct ClauseTemplate {
    pub label: ClauseLabel,
    pub heading: &'static str,
    /// Heading variants also listed in the alias table.
    pub aliases: &'static [&'static str],
    /// Heading variants only recoverable from the body text.
    pub paraphrases: &'static [&'static str],
    pub bodies: &'static [&'static str],
}

pub(super) const CLAUSES: &[ClauseTemplate] = &[
    ClauseTemplate {
        label: ClauseLabel::Definitions,
        heading: "Definitions",
        aliases: &["Defined Terms", "Certain Definitions"],
        paraphrases: &["Meaning of Terms", "Interpretation of Terms"],
        bodies: &[
            "Whenever used in this Agreement, the following words shall have the meanings set forth below unless the context otherwise requires. \"Authorized Person\" shall mean any officer of the Fund designated in writing to give Instructions. \"Business Day\" shall mean any day on which banks in New York are open for business. \"Securities\" shall mean stocks, bonds, notes and other instruments held for the Fund.\n\n\"Book-Entry System\" shall mean the Federal Reserve book-entry system and any successor system. Capitalized terms used but not defined herein have the meanings given to them in the Investment Company Act of 1940, as amended.",
            "As used in this Agreement, each of the following terms shall have the meaning given to it in this Section. \"Assets\" means the cash, securities and other property of each Fund delivered to the Custodian. \"Depository\" means any securities depository meeting the requirements of the rules under the 1940 Act. \"Proper Instructions\" has the meaning defined elsewhere in this Agreement.\n\nWords importing the singular include the plural and the term \"including\" means including without limitation. Defined terms apply equally to the singular and plural forms of the terms defined.",
        ],
    },
    ClauseTemplate {
        label: ClauseLabel::DutiesAndResponsibilities,
        heading: "Duties and Responsibilities",
        aliases: &["Duties of the Custodian", "Custodial Duties"],
        paraphrases: &["Custodial Undertakings", "Safekeeping and Related Services"],
        bodies: &[
            "The Custodian shall hold in safekeeping all Securities and cash delivered to it for the account of the Fund and shall segregate such Assets from its own property. The Custodian shall collect all income, dividends and interest payable on the Securities and credit the same to the account of the Fund.\n\nThe Custodian shall present for payment all Securities that mature or are called, shall exchange Securities in temporary form for definitive Securities, and shall forward to the Fund all proxies, notices of meetings and shareholder communications received in respect of the Securities.",
            "The Custodian agrees to perform the following duties with respect to the Assets of each Fund. It shall keep the Securities physically segregated or identified on its books as belonging to the Fund, receive and collect all dividends, interest and other income, and surrender Securities for payment at maturity or when called for redemption.\n\nThe responsibilities of the Custodian also include executing ownership certificates, forwarding proxy materials to the Fund, and maintaining records of all Securities held, which records shall be the property of the Fund.",
        ],
    },
    ClauseTemplate {
        label: ClauseLabel::AuthorizedPersons,
        heading: "Authorized Persons",
        aliases: &["Authorized Officers", "Persons Authorized"],
        paraphrases: &["Designated Signatories", "Officers Empowered to Act"],
        bodies: &[
            "The Fund shall deliver to the Custodian a certificate setting forth the names, titles and specimen signatures of the persons authorized to give Instructions on behalf of the Fund. The Custodian may rely on such certificate until it receives a new certificate designating different Authorized Persons. The following persons are designated as Authorized Persons:\n\n{persons}",
            "The persons authorized to act on behalf of the Fund under this Agreement are listed below, together with their titles and specimen signatures. The Fund may change the list of Authorized Persons at any time by delivering a certificate signed by its Secretary or Assistant Secretary. Authorized Persons:\n\n{persons}",
        ],
    },
    ClauseTemplate {
        label: ClauseLabel::Instructions,
        heading: "Instructions",
        aliases: &["Proper Instructions", "Oral and Written Instructions"],
        paraphrases: &["Directions from the Fund", "Communications from the Client"],
        bodies: &[
            "Proper Instructions shall mean instructions received by the Custodian in writing, by facsimile, by tested telex or through an electronic transmission system, in each case from an Authorized Person. Oral instructions shall be confirmed promptly in writing, and the Custodian shall be entitled to rely upon oral instructions it reasonably believes were given by an Authorized Person.\n\nThe Custodian shall act only upon Proper Instructions and shall not be responsible for any loss resulting from its reliance on instructions that conform to the procedures agreed by the parties.",
            "The Custodian shall take action with respect to the Assets only upon receipt of Proper Instructions. Instructions may be given orally, in writing, or by electronic communication through a secure transmission system approved by the Custodian, and oral instructions shall be confirmed in writing by the Fund.\n\nIn the event of a conflict between oral instructions and the written confirmation, the written instructions shall control, and the Custodian may rely on any instructions received through the agreed electronic system.",
        ],
    },
    ClauseTemplate {
        label: ClauseLabel::EvidenceOfAuthority,
        heading: "Evidence of Authority",
        aliases: &["Certified Resolutions", "Reliance on Documents"],
        paraphrases: &["Board Resolutions", "Proof of Corporate Action"],
        bodies: &[
            "The Custodian shall be protected in acting upon any instructions, notice, request, consent, certificate or other instrument or paper reasonably believed by it to be genuine and to have been properly executed by or on behalf of the Fund. The Custodian may receive and accept a certified copy of a vote or resolution of the Board of Trustees as conclusive evidence of the authority of any person to act.\n\nSuch certified resolution shall be signed by the Secretary and may be considered in full force and effect until receipt by the Custodian of written notice to the contrary.",
            "The Fund shall furnish the Custodian with a copy of the resolution of its Board, certified by the Secretary, evidencing the authority of the officers to enter into this Agreement. The Custodian may conclusively rely on any such certificate, vote or resolution and on any paper or document it reasonably believes to be genuine.\n\nThe Custodian shall be entitled to treat such evidence of authority as continuing until it receives a further certified resolution revoking or modifying it.",
        ],
    },
    ClauseTemplate {
        label: ClauseLabel::AccountTransactions,
        heading: "Account Transactions",
        aliases: &["Purchases and Sales", "Settlement of Transactions"],
        paraphrases: &["Movement of Assets", "Receipts and Deliveries"],
        bodies: &[
            "Upon receipt of Proper Instructions, the Custodian shall settle purchases of Securities for the account of the Fund by paying out cash against delivery of the Securities, and shall settle sales by delivering Securities against payment. Settlement shall be made in accordance with customary market practice, including delivery versus payment where available.\n\nThe Custodian shall credit the account of the Fund with the proceeds of each sale and debit the account for each purchase on the contractual settlement date, and may reverse any provisional credit if the transaction fails to settle.",
            "The Custodian shall receive and deliver Securities and cash for the account of the Fund in connection with purchases, sales, exchanges and other transactions only upon Proper Instructions. Payments for purchased Securities shall be made only upon receipt of the Securities, and deliveries of sold Securities shall be made only against payment.\n\nAll transactions shall be recorded in the account maintained for the Fund, and the Custodian shall provide the Fund with a daily statement of credits, debits and settled transactions.",
        ],
    },
    ClauseTemplate {
        label: ClauseLabel::Nominees,
        heading: "Nominees",
        aliases: &["Registration of Securities", "Registration in Nominee Name"],
        paraphrases: &["Form of Registration", "Name in Which Assets Are Held"],
        bodies: &[
            "Securities held by the Custodian for the Fund may be registered in the name of the Fund, in the name of the Custodian, or in the name of any nominee of the Custodian, or held in street name or in bearer form where customary. The Custodian shall be responsible for the acts of its nominees.\n\nThe Fund shall execute such documents as may be required to permit registration of Securities in the name of a nominee, and all Securities so registered shall be identified on the books of the Custodian as belonging to the Fund.",
            "The Custodian may cause any Securities to be registered in the name of a nominee or nominees of the Custodian, or in the name of a securities depository or its nominee. Securities in bearer form may be held by the Custodian in that form.\n\nRegistration of Securities in nominee name shall not affect the beneficial ownership of the Fund, and the Custodian shall maintain records identifying the registered holder of each Security.",
        ],
    },
    ClauseTemplate {
        label: ClauseLabel::Subcustodians,
        heading: "Subcustodians and Securities Depositories",
        aliases: &["Use of Securities Depositories", "Securities Depositories"],
        paraphrases: &["Book-Entry Systems", "Domestic Agents of the Custodian"],
        bodies: &[
            "The Custodian may deposit Securities with The Depository Trust Company, the Federal Reserve Book-Entry System or any other securities depository, provided that such depository meets the requirements of the applicable rules under the 1940 Act. Securities so deposited shall be held in an account of the Custodian that includes only assets held for customers.\n\nThe Custodian may also appoint one or more domestic subcustodians, each of which shall be a bank qualified to act as custodian, and the Custodian shall remain responsible for any subcustodian so appointed.",
            "With the consent of the Fund, the Custodian may employ subcustodians and may hold Securities in a securities depository or book-entry system. Each depository shall be a participant system registered as a clearing agency, and Securities held in a depository shall be identified on the records of the Custodian as belonging to the Fund.\n\nThe Custodian shall deliver to the Fund, upon request, a list of the subcustodians and depositories then used to hold Assets of the Fund.",
        ],
    },
    ClauseTemplate {
        label: ClauseLabel::ForeignCustodian,
        heading: "Foreign Custodian and Subcustodian",
        aliases: &["Foreign Custody Manager", "Foreign Subcustodians"],
        paraphrases: &["Non-U.S. Assets", "Assets Held Outside the United States"],
        bodies: &[
            "The Board of the Fund delegates to the Custodian the responsibilities of a Foreign Custody Manager under Rule 17f-5 with respect to foreign assets held outside the United States. The Custodian shall place foreign assets only with eligible foreign custodians and shall monitor each such foreign custody arrangement.\n\nThe Custodian shall provide the Board with an analysis of the custody risks associated with maintaining assets with each eligible securities depository in each country in which the Fund invests, as required by Rule 17f-7.",
            "Foreign securities of the Fund may be held by foreign subcustodians selected by the Custodian, provided that each foreign subcustodian is an eligible foreign custodian within the meaning of Rule 17f-5. The Custodian shall evaluate the country risk of each market and report material changes to the Board.\n\nForeign assets shall be held in accounts established for the Custodian's customers at each foreign subcustodian, and local market practice shall govern settlement in each foreign market.",
        ],
    },
    ClauseTemplate {
        label: ClauseLabel::StandardOfCare,
        heading: "Standard of Care; Liabilities",
        aliases: &["Standard of Care", "Responsibility of the Custodian"],
        paraphrases: &["Degree of Diligence", "Care of Assets"],
        bodies: &[
            "The Custodian shall exercise reasonable care, prudence and diligence in carrying out its duties under this Agreement, consistent with the standard of care of a professional custodian for hire. The Custodian shall be liable to the Fund only for losses resulting from its negligence, bad faith or willful misconduct.\n\nThe Custodian shall not be liable for any act or omission of a securities depository, except to the extent such loss results from the negligence or willful misconduct of the Custodian.",
            "In performing its obligations, the Custodian shall act in good faith and use the degree of care that a prudent professional custodian would exercise. The Custodian shall be held to the standard of reasonable care and shall be liable for direct losses caused by its negligent failure to perform, its bad faith or its willful misconduct.\n\nThe Custodian shall be responsible for the negligence of its nominees and agents to the same extent as for its own negligence.",
        ],
    },
    ClauseTemplate {
        label: ClauseLabel::LimitationsOfLiability,
        heading: "Limitations and Scope of Use or Liability",
        aliases: &["Limitation of Liability", "Limitations of Liability"],
        paraphrases: &["Exclusion of Certain Damages", "Events Beyond Control"],
        bodies: &[
            "In no event shall either party be liable for special, indirect, punitive or consequential damages, or for lost profits, even if advised of the possibility of such damages. The Custodian shall not be liable for any failure or delay resulting from acts of God, war, terrorism, strikes, failure of communications or power, or other causes beyond its reasonable control.\n\nThe services provided hereunder are for the exclusive use of the Fund and may not be used for any purpose outside the scope of this Agreement.",
            "Notwithstanding any other provision of this Agreement, neither party shall be liable for indirect, incidental, special or consequential damages of any kind. Neither party shall be responsible for delays caused by force majeure events, including natural disasters, civil unrest, governmental action or interruption of utilities beyond its control.\n\nThe limitations in this Section shall apply regardless of the form of action and shall survive the termination of this Agreement.",
        ],
    },
    ClauseTemplate {
        label: ClauseLabel::Indemnification,
        heading: "Indemnification",
        aliases: &["Indemnity", "Indemnities"],
        paraphrases: &["Hold Harmless", "Protection of the Custodian"],
        bodies: &[
            "The Fund shall indemnify and hold harmless the Custodian and its nominees from and against any and all losses, claims, damages, liabilities, costs and expenses, including reasonable attorneys' fees, arising out of any action taken or omitted in good faith under this Agreement, except to the extent caused by the negligence or willful misconduct of the Custodian.\n\nThe indemnified party shall give prompt notice of any claim for which indemnification may be sought, and the indemnifying party shall be entitled to assume the defense of such claim.",
            "The Custodian shall indemnify, defend and hold harmless the Fund against all claims, losses, damages and liabilities, including attorneys' fees, incurred as a result of the Custodian's negligence, bad faith or willful misconduct. The Fund shall likewise indemnify the Custodian for claims arising from its performance of Proper Instructions.\n\nThese indemnities shall survive the termination of this Agreement and shall extend to the directors, officers and employees of each indemnified party.",
        ],
    },
    ClauseTemplate {
        label: ClauseLabel::FeesAndExpenses,
        heading: "Fees and Expenses",
        aliases: &["Fees", "Compensation"],
        paraphrases: &["Payment for Services", "Remuneration"],
        bodies: &[
            "The Fund shall pay the Custodian compensation for its services at the rates set forth in the Fee Schedule, including an annual fee of {fee}, as such rates may be amended in writing from time to time. The Fund shall also reimburse the Custodian for its reasonable out-of-pocket expenses incurred in performing its services.\n\nFees and expenses shall be invoiced monthly and are payable within thirty (30) days of receipt of an invoice, and the Custodian may charge the account of the Fund for any fees that remain unpaid.",
            "For the services provided under this Agreement, the Fund shall pay the Custodian the fees agreed in writing between the parties, currently an annual fee of {fee} plus transaction charges. The Custodian shall be reimbursed for all out-of-pocket costs, including fees of subcustodians, postage and communication expenses.\n\nThe Custodian shall invoice the Fund monthly, and payment of fees and expenses shall be due upon receipt of each invoice.",
        ],
    },
    ClauseTemplate {
        label: ClauseLabel::FeeSchedule,
        heading: "Fee Schedule",
        aliases: &["Schedule of Fees", "Schedule A Fee Schedule"],
        paraphrases: &["Appendix of Charges", "Pricing Exhibit"],
        bodies: &[
            "The following fees apply to the custody services provided to the Fund and are computed on the basis of the average daily net assets held in custody:\n\nAsset-based fee: {bps} per annum on net assets held\nDomestic transaction charge: {txn} per transaction\nForeign transaction charge: {ftxn} per transaction\nAccount maintenance fee: {maint} per account per annum",
            "Custody charges under this schedule are assessed monthly in basis points on assets held and per transaction as follows:\n\nHoldings charge: {bps} per annum\nTransaction charge per settled trade: {txn}\nInternational settlement charge: {ftxn}\nMinimum annual charge per account: {maint}",
        ],
    },
    ClauseTemplate {
        label: ClauseLabel::ProprietaryInformation,
        heading: "Proprietary Information",
        aliases: &["Confidentiality", "Confidential Information"],
        paraphrases: &["Non-Disclosure", "Protection of Trade Secrets"],
        bodies: &[
            "Each party shall keep confidential all proprietary information of the other party, including its systems, software, client lists and non-public information regarding the Fund and its shareholders, and shall not disclose such information to any third party except as required by law or with the prior consent of the other party.\n\nConfidential information does not include information that is publicly available or independently developed, and each party shall return or destroy the proprietary information of the other upon request.",
            "The Custodian acknowledges that the portfolio holdings and other nonpublic information of the Fund are confidential and proprietary. The Custodian shall use such information solely to perform its services and shall not disclose it except to its employees and agents who need to know it and are bound by similar obligations of confidentiality.\n\nThe Fund likewise agrees that the systems, procedures and trade secrets of the Custodian constitute proprietary information that shall not be disclosed.",
        ],
    },
    ClauseTemplate {
        label: ClauseLabel::SuccessorCustodian,
        heading: "Successor Custodian",
        aliases: &["Appointment of Successor Custodian", "Successor"],
        paraphrases: &["Transfer to Replacement Bank", "Delivery of Assets to New Custodian"],
        bodies: &[
            "If a successor custodian is appointed by the Board of the Fund, the Custodian shall deliver to such successor custodian all Securities and cash then held for the Fund, duly endorsed and in form for transfer. If no successor custodian has been designated, the Custodian may deliver the Assets to a bank or trust company having capital, surplus and undivided profits of not less than {capital}.\n\nThe Custodian shall cooperate with the successor custodian in the orderly transfer of records and shall be entitled to payment of its fees through the date of transfer.",
            "Upon the designation of a successor custodian, the Custodian shall transfer to the successor all Assets of the Fund together with all records relating to them. Any successor custodian shall be a qualified bank with aggregate capital, surplus and undivided profits of at least {capital}.\n\nUntil delivery to the successor custodian is complete, the Custodian shall continue to hold the Assets under the terms of this Agreement.",
        ],
    },
    ClauseTemplate {
        label: ClauseLabel::Termination,
        heading: "Termination",
        aliases: &["Term and Termination", "Term"],
        paraphrases: &["Duration and Expiry", "Effectiveness and Ending of Agreement"],
        bodies: &[
            "{term}\n\nUpon termination of this Agreement, the Fund shall pay the Custodian all fees and expenses accrued through the date of termination, and the Custodian shall deliver the Assets as provided in this Agreement.",
            "{term}\n\nAny termination of this Agreement shall not affect obligations accrued before the termination date, and the provisions of this Agreement relating to indemnification shall survive termination.",
        ],
    },
    ClauseTemplate {
        label: ClauseLabel::GoverningLaw,
        heading: "Governing Law",
        aliases: &["Governing Law; Jurisdiction", "Choice of Law"],
        paraphrases: &["Law and Venue", "Applicable Legal Regime"],
        bodies: &[
            "This Agreement shall be construed in accordance with and governed by the laws of {state}, without regard to its conflict of laws principles. Each party submits to the jurisdiction of the state and federal courts located in {state} for any action arising out of this Agreement.",
            "The validity, interpretation and performance of this Agreement shall be governed by the laws of {state}, excluding conflict of laws rules. The parties consent to the exclusive jurisdiction and venue of the courts sitting in {state}.",
        ],
    },
    ClauseTemplate {
        label: ClauseLabel::Miscellaneous,
        heading: "Miscellaneous",
        aliases: &["General Provisions", "Miscellaneous Provisions"],
        paraphrases: &["Other Matters", "Final Clauses"],
        bodies: &[
            "This Agreement constitutes the entire agreement between the parties and supersedes all prior agreements. This Agreement may not be assigned by either party without the written consent of the other, and may be amended only by a written instrument signed by both parties. If any provision is held invalid, the remaining provisions shall not be affected.\n\nThis Agreement may be executed in counterparts, each of which shall be deemed an original. Section headings are for convenience only, and no waiver of any provision shall be effective unless in writing.",
            "Notices under this Agreement shall be in writing and addressed to each party at its principal office. The section headings are included for convenience only. This Agreement may be executed in one or more counterparts, and the invalidity of any provision shall not affect the validity of any other provision.\n\nThis Agreement is binding upon the parties and their permitted assigns, constitutes their entire understanding, and may be amended only in writing.",
        ],
    },
];

pub(super) const AMENDMENT_MISC: &[&str] = &[
    "Except as expressly amended hereby, all terms and conditions of the Agreement shall remain in full force and effect, and the Agreement as amended is hereby ratified and confirmed. This Amendment may be executed in counterparts, each of which shall be deemed an original.",
    "All other provisions of the Agreement remain unchanged and are hereby ratified and confirmed by the parties. This Amendment may be executed in one or more counterparts, which together shall constitute one instrument, and capitalized terms not defined herein have the meanings given in the Agreement.",
];

pub(super) const AMENDMENT_LEADS: &[&str] = &[
    "Section {n} of the Agreement is hereby deleted in its entirety and replaced with the following:",
    "The parties agree that Section {n} of the Agreement is amended and restated to read as follows:",
];

pub(super) const RECITALS: &[&str] = &[
    "WHEREAS, the Fund desires to appoint the Custodian as custodian of its securities and cash, and the Custodian is willing to accept such appointment on the terms set forth herein; and\n\nWHEREAS, the Fund is registered as an investment company under the Investment Company Act of 1940, as amended;\n\nNOW, THEREFORE, in consideration of the mutual covenants and premises herein contained, the parties hereto agree as follows:",
    "WITNESSETH: WHEREAS, the Fund wishes to retain the Custodian to hold its assets, and the Custodian desires to provide such services on the terms and conditions hereinafter set forth;\n\nNOW, THEREFORE, in consideration of the premises and mutual promises contained herein, the parties agree as follows:",
];

pub(super) const AMENDMENT_RECITALS: &[&str] = &[
    "WHEREAS, the parties desire to amend the Agreement as set forth below;\n\nNOW, THEREFORE, in consideration of the premises and mutual covenants herein contained, the parties hereto agree as follows:",
    "WHEREAS, the Fund and the Custodian wish to modify certain provisions of the Agreement;\n\nNOW, THEREFORE, the parties, intending to be legally bound, hereby agree as follows:",
];

pub(super) const FIRST_NAMES: &[&str] = &[
    "James", "Mary", "Robert", "Patricia", "Michael", "Linda", "David", "Susan", "Richard", "Karen", "Thomas",
    "Nancy", "Daniel", "Lisa", "Steven", "Margaret", "Andrew", "Laura", "Kevin", "Helen", "Brian", "Diane",
];
pub(super) const LAST_NAMES: &[&str] = &[
    "Anderson", "Bennett", "Carver", "Donnelly", "Ellison", "Fitzgerald", "Gallagher", "Hartman", "Iverson",
    "Jennings", "Kowalski", "Lindqvist", "Monroe", "Nakamura", "Okafor", "Prescott", "Quinlan", "Rosales",
    "Sutherland", "Thibodeaux", "Underwood", "Valentine", "Whitaker", "Yamamoto",
];
pub(super) const OFFICER_TITLES: &[&str] = &[
    "President", "Treasurer", "Vice President", "Assistant Treasurer", "Secretary", "Chief Financial Officer",
];

pub(super) const BRAND_ROOTS: &[&str] = &[
    "Harbor", "Meridian", "Summit", "Beacon", "Granite", "Cedar", "Aspen", "Sterling", "Pinnacle", "Liberty",
    "Heritage", "Northstar", "Bluewater", "Iron", "Red", "Silver", "Oak", "Fair", "West", "East", "Kings",
    "Lake", "River", "Stone", "Wind", "Ash", "Bright", "Copper", "Falcon", "Juniper", "Marlow", "Pelham",
    "Quarry", "Sable", "Tamarack", "Wexford",
];
pub(super) const BRAND_SUFFIXES: &[&str] = &["", "view", "point", "field", "gate", "wood", "ridge", "crest", "brook", "haven"];
pub(super) const STRATEGIES: &[&str] = &[
    "International Equity Income", "Small Cap Value", "Municipal Bond", "Global Growth", "Short Duration Income",
    "Emerging Markets Equity", "Core Fixed Income", "Dividend Growth", "High Yield Bond", "Large Cap Core",
    "Real Estate Securities", "Inflation Protected Securities", "Balanced Allocation", "Technology Opportunities",
    "Total Return Bond", "Mid Cap Opportunities", "Tax-Exempt Money Market", "Government Securities",
    "Natural Resources", "Health Sciences",
];
pub(super) const TRUST_SUFFIXES: &[&str] = &["Funds Trust", "Series Trust", "Investment Trust", "Trust"];
pub(super) const CUSTODIANS: &[&str] = &[
    "State Street Bank and Trust Company",
    "The Bank of New York Mellon",
    "JPMorgan Chase Bank, N.A.",
    "Brown Brothers Harriman & Co.",
    "Citibank, N.A.",
    "U.S. Bank National Association",
    "The Northern Trust Company",
    "Goldman Sachs Bank USA",
    "UMB Bank, N.A.",
    "Fifth Third Bank",
];
pub(super) const LAW_STATES: &[&str] = &["the Commonwealth of Massachusetts", "the State of New York", "the State of Delaware", "the State of Maryland"];
