package demo;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class DurationsTest {
    @Test
    public void thirtyDays() {
        assertEquals(2592000L, new Durations().showBug(30));
    }
}
