package demo;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class TallyTest {
    @Test
    public void independentTallies() {
        Tally a = new Tally(1L);
        Tally b = new Tally(100L);
        assertEquals(3L, a.showBug(2L));
    }
}
